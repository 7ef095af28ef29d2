#include "tdin/hawkes/hawkes.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tdin/nn/adam.hpp"
#include "tdin/nn/param_store.hpp"

namespace tdin::hawkes {

namespace {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Inverse of softplus, for initializing the reparameterized fit.
double softplus_inv(double y) {
    if (y > 30.0) return y;
    return std::log(std::expm1(std::max(y, 1e-10)));
}

}  // namespace

void HawkesParams::validate(bool require_stationary) const {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("hawkes: mu must be >= 0");
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("hawkes: a must be >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("hawkes: beta must be > 0");
    if (require_stationary && !(a / beta < 1.0)) {
        throw ValidationError("hawkes: branching ratio a/beta must be < 1 for simulation");
    }
}

std::string HawkesParams::to_json() const {
    nlohmann::json j{{"mu", mu}, {"a", a}, {"beta", beta}};
    return j.dump();
}

HawkesParams HawkesParams::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    HawkesParams p;
    p.mu = j.at("mu").get<double>();
    p.a = j.at("a").get<double>();
    p.beta = j.at("beta").get<double>();
    return p;
}

double hawkes_intensity(const HawkesParams& p, const std::vector<double>& history,
                        double t) {
    p.validate();
    double excitation = 0.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (double ti : history) {
        if (!(ti < t)) throw FutureEventInHistory("history event not before t");
        if (std::isfinite(prev)) {
            excitation = std::exp(-p.beta * (ti - prev)) * (1.0 + excitation);
        }
        prev = ti;
    }
    if (!std::isfinite(prev)) return p.mu;
    return p.mu + p.a * std::exp(-p.beta * (t - prev)) * (1.0 + excitation);
}

HawkesIntensity::HawkesIntensity(HawkesParams p, std::vector<double> history)
    : p_(p), times_(std::move(history)) {
    p_.validate();
    excitation_.reserve(times_.size());
    double r = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (i > 0) {
            if (!(times_[i] > times_[i - 1])) {
                throw ValidationError("hawkes history must be strictly increasing");
            }
            r = std::exp(-p_.beta * (times_[i] - times_[i - 1])) * (1.0 + r);
        }
        excitation_.push_back(r);
    }
}

double HawkesIntensity::value(double t) const {
    // Last event strictly before t.
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return p_.mu;
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    return p_.mu +
           p_.a * std::exp(-p_.beta * (t - times_[k])) * (1.0 + excitation_[k]);
}

std::vector<double> HawkesIntensity::breakpoints(double a, double b) const {
    std::vector<double> out;
    for (double t : times_) {
        if (t > a && t < b) out.push_back(t);
    }
    return out;
}

double hawkes_nll(const HawkesParams& p, const pp::EventSequence& seq,
                  const pp::Window& window) {
    std::array<double, 3> unused;
    return hawkes_nll_grad(p, seq, window, unused);
}

double hawkes_nll_grad(const HawkesParams& p, const pp::EventSequence& seq,
                       const pp::Window& window, std::array<double, 3>& grad) {
    p.validate();
    seq.validate();
    if (!(window.end > window.start)) throw EmptyWindow("empty observation window");

    grad = {0.0, 0.0, 0.0};
    double nll = 0.0;

    // Event terms: -sum log lambda(t_i), with the excitation recursion
    // carrying both the value and its beta-derivative.
    double exc = 0.0;       // sum exp(-beta (t_i - t_j)), j < i
    double exc_dbeta = 0.0; // d/dbeta of exc (negated time-weighted sum)
    for (std::size_t i = 0; i < seq.times.size(); ++i) {
        if (i > 0) {
            const double dt = seq.times[i] - seq.times[i - 1];
            const double decay = std::exp(-p.beta * dt);
            exc_dbeta = decay * (exc_dbeta - dt * (1.0 + exc));
            exc = decay * (1.0 + exc);
        }
        const double lam = p.mu + p.a * exc;
        if (!(lam > 0.0)) {
            throw NonPositiveIntensityAtEvent("hawkes intensity not positive at event");
        }
        nll -= std::log(lam);
        grad[0] -= 1.0 / lam;
        grad[1] -= exc / lam;
        grad[2] -= p.a * exc_dbeta / lam;
    }

    // Compensator, exactly: mu*T + (a/beta) * sum (1 - exp(-beta (T - t_i))).
    const double t_len = window.end - window.start;
    nll += p.mu * t_len;
    grad[0] += t_len;
    double s = 0.0, s_db = 0.0;
    for (double ti : seq.times) {
        const double rem = window.end - ti;
        const double e = std::exp(-p.beta * rem);
        s += 1.0 - e;
        s_db += rem * e;
    }
    nll += p.a / p.beta * s;
    grad[1] += s / p.beta;
    grad[2] += -p.a / (p.beta * p.beta) * s + p.a / p.beta * s_db;
    return nll;
}

FitResult fit_hawkes_mle(const pp::EventSequence& seq, const HawkesParams& init,
                         const FitOptions& opts) {
    seq.validate();
    if (seq.size() < 100) {
        throw ValidationError("fit_hawkes_mle needs at least 100 events");
    }
    init.validate();

    nn::ParamStore store;
    auto& theta = store.add("theta", {3});
    theta.data[0] = softplus_inv(std::max(init.mu, 1e-4));
    theta.data[1] = softplus_inv(std::max(init.a, 1e-4));
    theta.data[2] = softplus_inv(std::max(init.beta, 1e-4));

    nn::Adam adam({.lr = opts.lr});
    FitResult best;
    best.nll = std::numeric_limits<double>::infinity();

    std::array<double, 3> g{};
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const auto& th = store.param("theta").data;
        HawkesParams p{softplus(th[0]), softplus(th[1]), softplus(th[2])};
        const double nll = hawkes_nll_grad(p, seq, seq.window, g);
        if (nll < best.nll) {
            best.nll = nll;
            best.params = p;
        }
        auto& gt = store.grad("theta").data;
        double gnorm = 0.0;
        for (int k = 0; k < 3; ++k) {
            gt[k] = g[k] * sigmoid(th[k]);  // chain through the softplus
            gnorm += gt[k] * gt[k];
        }
        best.iterations = iter;
        if (std::sqrt(gnorm) < opts.grad_tolerance * static_cast<double>(seq.size())) {
            best.converged = true;
            break;
        }
        adam.step(store);
        store.zero_grads();
    }
    return best;
}

}  // namespace tdin::hawkes
