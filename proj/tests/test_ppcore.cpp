#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdin/hawkes/hawkes.hpp"
#include "tdin/pp/event_sequence.hpp"
#include "tdin/pp/likelihood.hpp"
#include "tdin/pp/thinning.hpp"
#include "tdin/rng.hpp"

using namespace tdin;

namespace {

// Closed-form homogeneous-Poisson log-likelihood, the independent oracle for
// constant intensities.
double poisson_ll(double rate, std::size_t n_events, double t_len) {
    return static_cast<double>(n_events) * std::log(rate) - rate * t_len;
}

pp::EventSequence make_seq(std::vector<double> times, double t0, double t1) {
    pp::EventSequence s;
    s.times = std::move(times);
    s.window = {t0, t1};
    return s;
}

}  // namespace

TEST_CASE("log likelihood of a constant intensity matches the closed form") {
    pp::ConstantIntensity lam(2.0);
    const auto seq = make_seq({0.3, 0.7}, 0.0, 1.0);
    const double ll = pp::log_likelihood(seq, lam, seq.window);
    CHECK(ll == doctest::Approx(2.0 * std::log(2.0) - 2.0).epsilon(1e-12));
    CHECK(ll == doctest::Approx(poisson_ll(2.0, 2, 1.0)).epsilon(1e-12));
}

TEST_CASE("log likelihood with no events is minus the compensator") {
    pp::ConstantIntensity lam(1.0);
    const auto seq = make_seq({}, 0.0, 1.0);
    CHECK(pp::log_likelihood(seq, lam, seq.window) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("log likelihood of a one-event exponential-kernel process") {
    // mu=0.5, a=0.8, beta=1, one event at 1.0 on [0, 2]. Hand integration:
    // integral = mu*2 + (a/beta) * (1 - exp(-beta*(2-1))).
    hawkes::HawkesIntensity lam({0.5, 0.8, 1.0}, {1.0});
    const auto seq = make_seq({1.0}, 0.0, 2.0);
    const double expected = std::log(0.5) - (1.0 + 0.8 * (1.0 - std::exp(-1.0)));
    CHECK(pp::log_likelihood(seq, lam, seq.window) ==
          doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("log likelihood input validation") {
    pp::ConstantIntensity ok(1.0);
    const auto seq = make_seq({0.5}, 0.0, 1.0);
    CHECK_THROWS_AS(pp::log_likelihood(seq, ok, {1.0, 1.0}), EmptyWindow);
    pp::ConstantIntensity dead(0.0);
    CHECK_THROWS_AS(pp::log_likelihood(seq, dead, seq.window), NonPositiveIntensityAtEvent);
}

TEST_CASE("constant likelihood agrees with the Poisson oracle on random cases") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const double rate = rng.uniform(0.2, 5.0);
        const double t_len = rng.uniform(0.5, 10.0);
        const int n = static_cast<int>(rng.index(20));
        std::vector<double> times;
        for (int k = 0; k < n; ++k) times.push_back(rng.uniform01() * t_len);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        const auto seq = make_seq(times, 0.0, t_len);
        pp::ConstantIntensity lam(rate);
        CHECK(pp::log_likelihood(seq, lam, seq.window) ==
              doctest::Approx(poisson_ll(rate, seq.size(), t_len)).epsilon(1e-9));
    }
}

TEST_CASE("compensator handles constants, smooth decay and degenerate intervals") {
    pp::ConstantIntensity two(2.0);
    CHECK(pp::compensator(two, 0.0, 3.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(pp::compensator(two, 1.5, 1.5) == 0.0);
    CHECK_THROWS_AS(pp::compensator(two, 2.0, 1.0), InvalidInterval);

    pp::FunctionIntensity decay([](double t) { return std::exp(-t); });
    CHECK(pp::compensator(decay, 0.0, 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("compensator is additive across a split point") {
    Rng rng(5);
    pp::FunctionIntensity decay([](double t) { return 0.3 + std::exp(-0.7 * t); });
    hawkes::HawkesIntensity hk({0.4, 0.6, 1.2}, {0.5, 1.1, 2.9});
    const pp::Intensity* cases[] = {&decay, &hk};
    for (const auto* lam : cases) {
        for (int i = 0; i < 10; ++i) {
            const double a = rng.uniform(0.0, 2.0);
            const double c = a + rng.uniform(0.5, 3.0);
            const double b = rng.uniform(a, c);
            const double whole = pp::compensator(*lam, a, c);
            const double split = pp::compensator(*lam, a, b) + pp::compensator(*lam, b, c);
            CHECK(whole == doctest::Approx(split).epsilon(1e-9));
        }
    }
}

TEST_CASE("density from intensity: exponential special cases") {
    pp::ConstantIntensity one(1.0);
    CHECK(pp::density_from_intensity(one, 0.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    pp::ConstantIntensity two(2.0);
    CHECK(pp::density_from_intensity(two, 0.0, 0.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(pp::density_from_intensity(two, 1.0, 0.5), TimeBeforeLastEvent);
}

TEST_CASE("density integrates to one over a long horizon") {
    pp::ConstantIntensity two(2.0);
    // Simpson over density values, truncated at t=20.
    const int n = 2000;
    const double h = 20.0 / n;
    double mass = 0.0;
    for (int i = 0; i < n; i += 2) {
        const double f0 = pp::density_from_intensity(two, 0.0, i * h);
        const double f1 = pp::density_from_intensity(two, 0.0, (i + 1) * h);
        const double f2 = pp::density_from_intensity(two, 0.0, (i + 2) * h);
        mass += h / 3.0 * (f0 + 4.0 * f1 + f2);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("density mass equals one minus the survival of the compensator") {
    Rng rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const double mu = rng.uniform(0.2, 1.0);
        const double a = rng.uniform(0.1, 0.8);
        const double beta = rng.uniform(0.6, 1.6);
        std::vector<double> hist;
        double t = 0.0;
        for (int k = 0, n = 1 + static_cast<int>(rng.index(4)); k < n; ++k) {
            t += rng.uniform(0.2, 1.0);
            hist.push_back(t);
        }
        hawkes::HawkesIntensity lam({mu, a, beta}, hist);
        const double t_last = hist.back();
        const double horizon = t_last + rng.uniform(1.0, 4.0);

        const int n = 800;
        const double h = (horizon - t_last) / n;
        double mass = 0.0;
        for (int i = 0; i < n; i += 2) {
            const double f0 = pp::density_from_intensity(lam, t_last, t_last + i * h);
            const double f1 = pp::density_from_intensity(lam, t_last, t_last + (i + 1) * h);
            const double f2 = pp::density_from_intensity(lam, t_last, t_last + (i + 2) * h);
            mass += h / 3.0 * (f0 + 4.0 * f1 + f2);
        }
        const double expected = 1.0 - std::exp(-pp::compensator(lam, t_last, horizon));
        CHECK(mass == doctest::Approx(expected).epsilon(1e-6));
    }
}

namespace {

pp::EventSequence simulate_constant(double rate, double t_len, std::uint64_t seed) {
    return pp::simulate_thinning(
        [rate](const std::vector<double>&, double) { return rate; },
        [rate](const std::vector<double>&, double) {
            return pp::ThinningBound{rate, std::numeric_limits<double>::infinity()};
        },
        {0.0, t_len}, seed);
}

pp::EventSequence simulate_hawkes(const hawkes::HawkesParams& p, double t_len,
                                  std::uint64_t seed) {
    return pp::simulate_thinning(
        [p](const std::vector<double>& hist, double t) {
            return hawkes::hawkes_intensity(p, hist, t);
        },
        [p](const std::vector<double>& hist, double t) {
            // The exponential kernel only decays between events, so the
            // intensity just after t dominates until the next acceptance.
            return pp::ThinningBound{hawkes::hawkes_intensity(p, hist, t),
                                     std::numeric_limits<double>::infinity()};
        },
        {0.0, t_len}, seed);
}

}  // namespace

TEST_CASE("thinning: constant-rate counts stay inside the 3-sigma band") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        const auto seq = simulate_constant(3.0, 100.0, seed);
        const double sigma = std::sqrt(300.0);
        CHECK(static_cast<double>(seq.size()) >= 300.0 - 3.0 * sigma);
        CHECK(static_cast<double>(seq.size()) <= 300.0 + 3.0 * sigma);
        seq.validate();
    }
}

TEST_CASE("thinning: zero intensity yields an empty sequence") {
    const auto seq = simulate_constant(0.0, 50.0, 9);
    CHECK(seq.empty());
}

TEST_CASE("thinning: self-exciting stationary rate matches the branching ratio") {
    // mu=0.2, a=0.5, beta=1: stationary rate mu / (1 - a/beta) = 0.4 and
    // asymptotic count variance mu*T / (1 - a/beta)^3.
    const auto seq = simulate_hawkes({0.2, 0.5, 1.0}, 2000.0, 42);
    const double expect = 0.4 * 2000.0;
    const double sigma = std::sqrt(0.2 * 2000.0 / std::pow(0.5, 3));
    CHECK(static_cast<double>(seq.size()) > expect - 3.0 * sigma);
    CHECK(static_cast<double>(seq.size()) < expect + 3.0 * sigma);
}

TEST_CASE("thinning is deterministic given the seed and rejects broken bounds") {
    const auto a = simulate_constant(2.0, 30.0, 77);
    const auto b = simulate_constant(2.0, 30.0, 77);
    CHECK(a.times == b.times);

    CHECK_THROWS_AS(pp::simulate_thinning(
                        [](const std::vector<double>&, double) { return 5.0; },
                        [](const std::vector<double>&, double) {
                            return pp::ThinningBound{1.0, 1e9};
                        },
                        {0.0, 10.0}, 3),
                    BoundViolation);
}

TEST_CASE("simulated data prefers its own generating parameters") {
    // The truth should beat every +-50% single-parameter perturbation on long
    // sequences, in at least 95% of the comparisons.
    const hawkes::HawkesParams truth{0.3, 0.4, 1.0};
    int wins = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const double t_len = 2000.0 / 0.5;  // stationary rate 0.5
        const auto seq = simulate_hawkes(truth, t_len, 100 + seed);
        REQUIRE(seq.size() >= 2000);
        const double ll_true = -hawkes::hawkes_nll(truth, seq, seq.window);
        for (int dim = 0; dim < 3; ++dim) {
            for (double f : {0.5, 1.5}) {
                hawkes::HawkesParams p = truth;
                if (dim == 0) p.mu *= f;
                if (dim == 1) p.a *= f;
                if (dim == 2) p.beta *= f;
                const double ll = -hawkes::hawkes_nll(p, seq, seq.window);
                wins += ll_true > ll ? 1 : 0;
                ++total;
            }
        }
    }
    CHECK(wins >= static_cast<int>(0.95 * total));
}

TEST_CASE("expected next time: memoryless cases and degenerate horizons") {
    pp::ConstantIntensity two(2.0);
    CHECK(pp::expected_next_time(two, 0.0, 20.0) == doctest::Approx(0.5).epsilon(1e-3));
    pp::ConstantIntensity one(1.0);
    CHECK(pp::expected_next_time(one, 5.0, 25.0) == doctest::Approx(6.0).epsilon(1e-3));
    CHECK_THROWS_AS(pp::expected_next_time(one, 5.0, 5.0), DegenerateHorizon);
}

TEST_CASE("expected next time matches a Monte Carlo first-arrival oracle") {
    const hawkes::HawkesParams p{0.5, 0.8, 1.0};
    const std::vector<double> hist{0.4, 1.7, 2.2};
    const double t_c = 2.5;
    const double horizon = t_c + 15.0;
    hawkes::HawkesIntensity lam(p, hist);
    const double predicted = pp::expected_next_time(lam, t_c, horizon, 1024);

    // First arrival of the frozen-history process by thinning; the intensity
    // only decays after t_c, so its value at the current time is a bound.
    Rng rng(2024);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double t = t_c;
        double first = horizon;
        while (t < horizon) {
            const double bound = lam.value(t) + 1e-12;
            t += rng.exponential(bound);
            if (t >= horizon) break;
            if (rng.uniform01() * bound < lam.value(t)) {
                first = t;
                break;
            }
        }
        sum += first;
        sumsq += first * first;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::fabs(predicted - mean) < 2.0 * se);
}

TEST_CASE("event sequences survive a JSONL round trip") {
    const auto seq = simulate_constant(1.5, 20.0, 5);
    const std::string path = "/tmp/tdin_test_events.jsonl";
    pp::write_jsonl(seq, path);
    const auto back = pp::read_jsonl(path);
    CHECK(back.times == seq.times);
}
