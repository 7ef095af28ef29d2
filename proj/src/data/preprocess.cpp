#include "tdin/data/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "tdin/errors.hpp"

namespace tdin::data {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool excluded_type(const std::string& deal_type) {
    const std::string t = lowercase(deal_type);
    return t == "block purchase" || t == "creeping acquisition" || t == "privatization";
}

}  // namespace

std::vector<DealRecord> filter_deals(const std::vector<DealRecord>& raw) {
    std::vector<DealRecord> kept;
    kept.reserve(raw.size());
    for (const auto& d : raw) {
        if (d.acquirer == d.target) continue;  // intra-company reassignment
        if (!(d.pct_acquired > 20.0)) continue;
        if (!(d.pct_after > 50.0)) continue;
        if (!(d.value_musd > 1.0)) continue;
        if (excluded_type(d.deal_type)) continue;
        kept.push_back(d);
    }
    return kept;
}

std::set<graph::FirmId> frequent_acquirers(const std::vector<DealRecord>& deals,
                                           int min_count) {
    std::map<graph::FirmId, int> counts;
    for (const auto& d : deals) ++counts[d.acquirer];
    std::set<graph::FirmId> out;
    for (const auto& [firm, n] : counts) {
        if (n >= min_count) out.insert(firm);
    }
    return out;
}

FeatureTable interpolate_missing(const FeatureTable& table) {
    FeatureTable out = table;
    if (out.empty()) return out;
    const std::size_t n_cols = kAccountingCount;

    // Forward fill within each firm.
    for (auto& [firm, by_period] : out.rows()) {
        std::vector<double> carry(n_cols, std::numeric_limits<double>::quiet_NaN());
        for (auto& [period, row] : by_period) {
            if (row.accounting.size() != n_cols) {
                throw ValidationError("feature row for " + firm + " has wrong width");
            }
            for (std::size_t c = 0; c < n_cols; ++c) {
                if (std::isnan(row.accounting[c])) {
                    row.accounting[c] = carry[c];
                } else {
                    carry[c] = row.accounting[c];
                }
            }
        }
    }

    // Cross-firm per-period means of what is known after the forward fill.
    std::map<int, std::vector<std::pair<double, int>>> sums;  // period -> (sum, count) per col
    for (const auto& [firm, by_period] : out.rows()) {
        for (const auto& [period, row] : by_period) {
            auto& acc = sums[period];
            acc.resize(n_cols, {0.0, 0});
            for (std::size_t c = 0; c < n_cols; ++c) {
                if (!std::isnan(row.accounting[c])) {
                    acc[c].first += row.accounting[c];
                    ++acc[c].second;
                }
            }
        }
    }
    std::map<int, std::vector<double>> means;
    for (const auto& [period, acc] : sums) {
        auto& m = means[period];
        m.assign(n_cols, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (acc[c].second > 0) m[c] = acc[c].first / acc[c].second;
        }
    }
    // Periods where nobody reports a column borrow the nearest earlier mean,
    // then the nearest later one.
    for (std::size_t c = 0; c < n_cols; ++c) {
        double carry = std::numeric_limits<double>::quiet_NaN();
        for (auto& [period, m] : means) {
            if (std::isnan(m[c])) {
                m[c] = carry;
            } else {
                carry = m[c];
            }
        }
        carry = std::numeric_limits<double>::quiet_NaN();
        for (auto it = means.rbegin(); it != means.rend(); ++it) {
            if (std::isnan(it->second[c])) {
                it->second[c] = carry;
            } else {
                carry = it->second[c];
            }
        }
        if (std::isnan(means.begin()->second[c])) {
            throw ColumnGloballyMissing(std::string("column '") + kAccountingColumns[c] +
                                        "' is missing for every firm");
        }
    }

    for (auto& [firm, by_period] : out.rows()) {
        for (auto& [period, row] : by_period) {
            const auto& m = means.at(period);
            for (std::size_t c = 0; c < n_cols; ++c) {
                if (std::isnan(row.accounting[c])) row.accounting[c] = m[c];
            }
        }
    }
    return out;
}

}  // namespace tdin::data
