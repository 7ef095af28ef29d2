#include "tdin/pp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tdin::pp {

namespace {

// 3-point Gauss-Legendre abscissae and weights on [-1, 1].
constexpr double kGlX = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGlW0 = 5.0 / 9.0;
constexpr double kGlW1 = 8.0 / 9.0;

double gl3(const Intensity& lambda, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    return h * (kGlW0 * lambda.value(c - h * kGlX) + kGlW1 * lambda.value(c) +
                kGlW0 * lambda.value(c + h * kGlX));
}

// Integrates one smooth piece with n_sub composite Gauss-Legendre panels.
double integrate_piece(const Intensity& lambda, double a, double b, int n_sub) {
    double acc = 0.0;
    const double h = (b - a) / n_sub;
    for (int i = 0; i < n_sub; ++i) {
        acc += gl3(lambda, a + i * h, a + (i + 1) * h);
    }
    return acc;
}

std::vector<double> piece_edges(const Intensity& lambda, double a, double b) {
    std::vector<double> edges = lambda.breakpoints(a, b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges.insert(edges.begin(), a);
    edges.push_back(b);
    return edges;
}

}  // namespace

double compensator(const Intensity& lambda, double a, double b, int n_nodes) {
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw InvalidInterval("compensator interval must satisfy a <= b");
    }
    if (a == b) return 0.0;
    const int n_sub = std::max(1, n_nodes / 3);
    const auto edges = piece_edges(lambda, a, b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (edges[i + 1] > edges[i]) {
            total += integrate_piece(lambda, edges[i], edges[i + 1], n_sub);
        }
    }
    return total;
}

double log_likelihood(const EventSequence& seq, const Intensity& lambda,
                      const Window& window, int n_nodes) {
    if (!(window.end > window.start)) throw EmptyWindow("empty observation window");
    seq.validate();
    double sum_log = 0.0;
    for (double t : seq.times) {
        const double v = lambda.value(t);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw NonPositiveIntensityAtEvent("intensity not positive at event time");
        }
        sum_log += std::log(v);
    }
    return sum_log - compensator(lambda, window.start, window.end, n_nodes);
}

double density_from_intensity(const Intensity& lambda, double t_last, double t,
                              int n_nodes) {
    if (t < t_last) throw TimeBeforeLastEvent("density requested before last event");
    return lambda.value(t) * std::exp(-compensator(lambda, t_last, t, n_nodes));
}

double expected_next_time(const Intensity& lambda, double t_c, double horizon,
                          int n_points) {
    if (!(horizon > t_c)) throw DegenerateHorizon("horizon must exceed t_c");
    // E[min(T, horizon)] = t_c + integral of the survival function, which is
    // the truncated moment plus the tail mass placed at the horizon.
    const auto edges = piece_edges(lambda, t_c, horizon);
    const double total_len = horizon - t_c;
    double cum = 0.0;       // running integrated intensity
    double surv_int = 0.0;  // integral of exp(-cum)
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double pa = edges[i];
        const double pb = edges[i + 1];
        if (!(pb > pa)) continue;
        const int n_sub =
            std::max(4, static_cast<int>(std::lround(n_points * (pb - pa) / total_len)));
        const double h = (pb - pa) / n_sub;
        for (int k = 0; k < n_sub; ++k) {
            const double x0 = pa + k * h;
            const double x1 = x0 + h;
            const double xm = 0.5 * (x0 + x1);
            const double s0 = std::exp(-cum);
            cum += gl3(lambda, x0, xm);
            const double sm = std::exp(-cum);
            cum += gl3(lambda, xm, x1);
            const double s1 = std::exp(-cum);
            surv_int += (x1 - x0) / 6.0 * (s0 + 4.0 * sm + s1);
        }
    }
    return t_c + surv_int;
}

}  // namespace tdin::pp
