#include "tdin/pp/thinning.hpp"

#include <cmath>

#include "tdin/rng.hpp"

namespace tdin::pp {

EventSequence simulate_thinning(const HistoryIntensity& lambda,
                                const BoundProvider& bound_provider,
                                const Window& window, std::uint64_t seed) {
    if (!(window.end >= window.start)) throw EmptyWindow("empty simulation window");
    Rng rng(seed);
    EventSequence seq;
    seq.window = window;

    double t = window.start;
    while (t < window.end) {
        const ThinningBound tb = bound_provider(seq.times, t);
        if (!(tb.bound >= 0.0) || !std::isfinite(tb.bound)) {
            throw BoundViolation("bound provider returned a bad bound");
        }
        if (tb.bound == 0.0) {
            if (!std::isfinite(tb.valid_for)) break;  // process is dead
            t += tb.valid_for;
            continue;
        }
        const double gap = rng.exponential(tb.bound);
        if (gap > tb.valid_for) {
            t += tb.valid_for;  // bound expired before a proposal landed
            continue;
        }
        t += gap;
        if (t >= window.end) break;
        const double v = lambda(seq.times, t);
        if (v > tb.bound * (1.0 + 1e-9)) {
            throw BoundViolation("intensity exceeded its stated bound");
        }
        if (rng.uniform01() * tb.bound < v) {
            seq.times.push_back(t);
        }
    }
    return seq;
}

}  // namespace tdin::pp
