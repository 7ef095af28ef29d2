#include "tdin/pp/event_sequence.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace tdin::pp {

void EventSequence::validate() const {
    if (!(window.end >= window.start)) throw EmptyWindow("window end before start");
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : times) {
        if (!std::isfinite(t)) throw ValidationError("non-finite event time");
        if (t <= prev) throw ValidationError("event times not strictly increasing");
        if (!window.contains(t)) throw ValidationError("event outside window");
        prev = t;
    }
}

void write_jsonl(const EventSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    for (double t : seq.times) {
        nlohmann::json rec;
        rec["t"] = t;
        rec["type"] = 0;
        rec["meta"] = nlohmann::json::object();
        out << rec.dump() << '\n';
    }
    if (!out) throw IoFailure("write failed for " + path);
}

EventSequence read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    EventSequence seq;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto rec = nlohmann::json::parse(line);
        seq.times.push_back(rec.at("t").get<double>());
    }
    if (!seq.times.empty()) {
        seq.window.start = 0.0;
        seq.window.end = seq.times.back();
    }
    return seq;
}

}  // namespace tdin::pp
