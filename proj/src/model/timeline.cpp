#include "tdin/model/timeline.hpp"

#include <algorithm>
#include <cmath>

#include "tdin/errors.hpp"
#include "tdin/log.hpp"

namespace tdin::model {

namespace {

bool features_differ(const data::FirmFeatures& a, const data::FirmFeatures& b) {
    return a.accounting != b.accounting || a.text_embedding != b.text_embedding;
}

}  // namespace

std::array<double, 3> event_embedding(double prev_t, const EventRecord& rec) {
    if (rec.t < prev_t) throw NegativeGap("event embedding with negative time gap");
    return {rec.t - prev_t, static_cast<double>(rec.kind), rec.similarity};
}

Timelines build_timelines(const data::Dataset& ds) {
    Timelines out;
    for (const auto& firm : ds.frequent) {
        out.emplace(firm, AcquirerTimeline{firm, {}});
    }

    // Feature updates at period boundaries where the vector changed. The
    // first observed period counts as a change when a prior one exists.
    for (auto& [firm, tl] : out) {
        for (int p = 1; p < ds.n_years; ++p) {
            const int year = ds.year0 + p;
            const auto* cur = ds.features.find(firm, year);
            const auto* prev = ds.features.find(firm, year - 1);
            const bool changed =
                (cur != nullptr && prev == nullptr) ||
                (cur != nullptr && prev != nullptr && features_differ(*cur, *prev));
            if (changed) {
                tl.records.push_back(
                    {static_cast<double>(p), EventKind::kFeatureUpdate, 0.0, std::nullopt});
            }
        }
    }

    // Deal-driven records. Deals by any firm (frequent or not) reach their
    // neighbors as peer events; only frequent acquirers get self records.
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& deal : ds.deals) {
        if (deal.t < prev_t) throw ValidationError("deals are not sorted by time");
        prev_t = deal.t;
        const auto& snap = graph::snapshot_at(ds.graph, ds.to_calendar(deal.t));

        auto self_it = out.find(deal.acquirer);
        if (self_it != out.end()) {
            if (ds.features.find(deal.target, ds.period_of(deal.t)) == nullptr) {
                throw UnknownFirmInDeal("deal target " + deal.target +
                                        " has no features at the deal period");
            }
            const double sim = snap.has_node(deal.acquirer) && snap.has_node(deal.target)
                                   ? snap.edge_score(deal.acquirer, deal.target)
                                   : 0.0;
            self_it->second.records.push_back(
                {deal.t, EventKind::kSelf, sim, deal.target});
        }

        if (snap.has_node(deal.acquirer)) {
            for (const auto& nb : snap.neighbors(deal.acquirer)) {
                auto it = out.find(nb);
                if (it == out.end()) continue;
                it->second.records.push_back({deal.t, EventKind::kPeer,
                                              snap.edge_score(nb, deal.acquirer),
                                              std::nullopt});
            }
        }
    }

    for (auto& [firm, tl] : out) {
        std::sort(tl.records.begin(), tl.records.end(),
                  [](const EventRecord& a, const EventRecord& b) {
                      if (a.t != b.t) return a.t < b.t;
                      if (a.kind != b.kind) return a.kind < b.kind;
                      if (a.similarity != b.similarity) return a.similarity < b.similarity;
                      return a.target.value_or("") < b.target.value_or("");
                  });
        for (std::size_t i = 1; i < tl.records.size(); ++i) {
            if (tl.records[i].t <= tl.records[i - 1].t) {
                tl.records[i].t = tl.records[i - 1].t + 1e-9;
                log::debug("jittered simultaneous record on timeline of " + firm);
            }
        }
    }
    return out;
}

}  // namespace tdin::model
