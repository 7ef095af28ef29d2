#pragma once

#include <string>
#include <vector>

#include "tdin/errors.hpp"

namespace tdin::pp {

// Observation window [start, end], times in years since window start.
struct Window {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    bool contains(double t) const { return t >= start && t <= end; }
};

// One realization of a (one-dimensional) point process: strictly increasing
// event times inside the window.
struct EventSequence {
    std::vector<double> times;
    Window window;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    // Throws if times are not finite, not strictly increasing, or fall
    // outside the window.
    void validate() const;
};

// JSONL serialization, one record per line: {"t": ..., "type": ..., "meta": {}}.
// Bare sequences carry type 0.
void write_jsonl(const EventSequence& seq, const std::string& path);
EventSequence read_jsonl(const std::string& path);

}  // namespace tdin::pp
