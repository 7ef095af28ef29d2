#pragma once

#include <array>

#include "tdin/data/records.hpp"
#include "tdin/model/types.hpp"

namespace tdin::model {

// Expands the dataset into one timeline per frequent acquirer: a SelfMA
// record per own deal, a PeerMA record whenever a neighbor (under the
// snapshot in force at the deal time) acquires, and a FeatureUpdate record at
// every period boundary where the acquirer's features change. Exact time ties
// are broken by a +1e-9 jitter so each timeline stays strictly increasing.
Timelines build_timelines(const data::Dataset& ds);

// (time gap since the previous record, event kind as a real, similarity).
std::array<double, 3> event_embedding(double prev_t, const EventRecord& rec);

}  // namespace tdin::model
