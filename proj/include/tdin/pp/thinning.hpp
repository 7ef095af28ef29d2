#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "tdin/pp/event_sequence.hpp"

namespace tdin::pp {

// Conditional intensity over a growing history: the history holds the events
// accepted so far, and t is strictly after all of them.
using HistoryIntensity =
    std::function<double(const std::vector<double>& history, double t)>;

// A dominating bound for the intensity on [t, t + valid_for), assuming no new
// event is accepted in between. valid_for may be infinite.
struct ThinningBound {
    double bound = 0.0;
    double valid_for = std::numeric_limits<double>::infinity();
};

using BoundProvider =
    std::function<ThinningBound(const std::vector<double>& history, double t)>;

// Ogata thinning: exact samples from the process defined by the intensity.
// Deterministic given the seed. Throws BoundViolation if the intensity ever
// exceeds the bound the provider promised.
EventSequence simulate_thinning(const HistoryIntensity& lambda,
                                const BoundProvider& bound_provider,
                                const Window& window, std::uint64_t seed);

}  // namespace tdin::pp
