#pragma once

#include <set>
#include <vector>

#include "tdin/data/records.hpp"

namespace tdin::data {

// Majority-takeover filter: keeps deals with pct_acquired > 20, pct_after >
// 50, value above one million USD, a deal type that is not a block purchase,
// creeping acquisition, or privatization, and distinct acquirer and target.
std::vector<DealRecord> filter_deals(const std::vector<DealRecord>& raw);

// Firms appearing as acquirer at least min_count times.
std::set<graph::FirmId> frequent_acquirers(const std::vector<DealRecord>& deals,
                                           int min_count = 4);

// Fills missing accounting entries: per-firm forward fill from the previous
// period first, then the cross-firm per-period mean for anything left
// (columns entirely missing for a firm, or gaps before the first
// observation). Observed values are never touched.
FeatureTable interpolate_missing(const FeatureTable& table);

}  // namespace tdin::data
