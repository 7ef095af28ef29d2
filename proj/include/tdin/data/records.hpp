#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tdin/graph/graph.hpp"

namespace tdin::data {

// Accounting schema: the 17 per-firm columns used everywhere, in fixed order.
inline constexpr std::array<const char*, 17> kAccountingColumns = {
    "Size",          "Market-to-book ratio", "Leverage",      "ROA",
    "Sales growth",  "PPE",                  "Cash",          "Sale",
    "Cash-to-asset", "Cash-to-sales",        "Sales-to-asset", "Current ratio",
    "Asset growth",  "GSI",                  "DE",            "R&D",
    "ROE"};

inline constexpr std::size_t kAccountingCount = kAccountingColumns.size();

// One completed deal. Time is fractional years since the window start.
struct DealRecord {
    graph::FirmId acquirer;
    graph::FirmId target;
    double t = 0.0;
    double pct_acquired = 100.0;
    double pct_after = 100.0;
    double value_musd = 0.0;
    std::string deal_type = "merger";
};

// Per-firm, per-period feature row: accounting vector plus the precomputed
// text-embedding vector. Missing accounting entries are NaN until
// interpolation completes.
struct FirmFeatures {
    graph::FirmId firm;
    int period = 0;  // calendar year
    std::vector<double> accounting;
    std::vector<double> text_embedding;

    bool complete() const {
        for (double v : accounting) {
            if (std::isnan(v)) return false;
        }
        return true;
    }
};

class FeatureTable {
  public:
    void put(FirmFeatures f) { rows_[f.firm][f.period] = std::move(f); }

    const FirmFeatures* find(const graph::FirmId& firm, int period) const {
        auto fit = rows_.find(firm);
        if (fit == rows_.end()) return nullptr;
        auto pit = fit->second.find(period);
        return pit == fit->second.end() ? nullptr : &pit->second;
    }

    // Latest row at or before the period; nullptr when the firm has none.
    const FirmFeatures* find_at_or_before(const graph::FirmId& firm, int period) const {
        auto fit = rows_.find(firm);
        if (fit == rows_.end()) return nullptr;
        auto pit = fit->second.upper_bound(period);
        if (pit == fit->second.begin()) return nullptr;
        return &std::prev(pit)->second;
    }

    std::vector<graph::FirmId> firms_in_period(int period) const {
        std::vector<graph::FirmId> out;
        for (const auto& [firm, by_period] : rows_) {
            if (by_period.count(period)) out.push_back(firm);
        }
        return out;  // sorted: rows_ is an ordered map
    }

    bool empty() const { return rows_.empty(); }

    std::map<graph::FirmId, std::map<int, FirmFeatures>>& rows() { return rows_; }
    const std::map<graph::FirmId, std::map<int, FirmFeatures>>& rows() const { return rows_; }

  private:
    std::map<graph::FirmId, std::map<int, FirmFeatures>> rows_;
};

// Everything training and evaluation consume: filtered deals, complete
// features, the dynamic graph, and the frequent-acquirer set.
struct Dataset {
    int year0 = 1997;
    int n_years = 24;
    std::vector<DealRecord> deals;  // sorted by t
    FeatureTable features;
    graph::DynamicGraph graph;
    std::set<graph::FirmId> frequent;
    int k_top = 10;
    double threshold = 0.2;

    double t_end() const { return static_cast<double>(n_years); }

    double to_calendar(double t) const { return static_cast<double>(year0) + t; }

    // Calendar year containing t, clamped to the observation window.
    int period_of(double t) const {
        int p = static_cast<int>(std::floor(t));
        if (p < 0) p = 0;
        if (p > n_years - 1) p = n_years - 1;
        return year0 + p;
    }
};

}  // namespace tdin::data
