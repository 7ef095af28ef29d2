#include "tdin/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tdin/io/csv.hpp"

namespace tdin::graph {

namespace {

std::pair<FirmId, FirmId> canon(const FirmId& a, const FirmId& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

GraphSnapshot::GraphSnapshot(int period, std::map<std::pair<FirmId, FirmId>, double> edges,
                             std::set<FirmId> nodes)
    : period_(period), edges_(std::move(edges)), nodes_(std::move(nodes)) {
    for (const auto& [pair, score] : edges_) {
        if (pair.first == pair.second) throw ValidationError("self-loop in snapshot");
        if (!nodes_.count(pair.first) || !nodes_.count(pair.second)) {
            throw ValidationError("edge endpoint missing from node set");
        }
        adjacency_[pair.first].insert(pair.second);
        adjacency_[pair.second].insert(pair.first);
    }
    for (const auto& n : nodes_) adjacency_.try_emplace(n);
}

const std::set<FirmId>& GraphSnapshot::neighbors(const FirmId& firm) const {
    auto it = adjacency_.find(firm);
    if (it == adjacency_.end()) throw UnknownFirm("unknown firm: " + firm);
    return it->second;
}

double GraphSnapshot::edge_score(const FirmId& u, const FirmId& v) const {
    auto it = edges_.find(canon(u, v));
    return it == edges_.end() ? 0.0 : it->second;
}

GraphSnapshot build_snapshot(const std::vector<SimilarityRecord>& records, int period,
                             int k, double threshold) {
    if (k < 1) throw ValidationError("build_snapshot: k must be >= 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ValidationError("build_snapshot: threshold must lie in [0, 1]");
    }

    // Deduplicate pairs (keep the highest score) and collect nodes.
    std::map<std::pair<FirmId, FirmId>, double> scores;
    std::set<FirmId> nodes;
    for (const auto& r : records) {
        if (r.period != period) continue;
        if (r.firm_a == r.firm_b) throw ValidationError("similarity self-pair");
        if (!(r.score >= 0.0 && r.score <= 1.0)) {
            throw ValidationError("similarity score outside [0, 1]");
        }
        const auto key = canon(r.firm_a, r.firm_b);
        auto it = scores.find(key);
        if (it == scores.end() || it->second < r.score) scores[key] = r.score;
        nodes.insert(r.firm_a);
        nodes.insert(r.firm_b);
    }

    std::map<FirmId, std::vector<std::pair<double, FirmId>>> ranked;
    for (const auto& [pair, score] : scores) {
        ranked[pair.first].emplace_back(score, pair.second);
        ranked[pair.second].emplace_back(score, pair.first);
    }

    std::map<std::pair<FirmId, FirmId>, double> edges;
    // Threshold rule: keep every pair at or above the cutoff.
    for (const auto& [pair, score] : scores) {
        if (score >= threshold) edges[pair] = score;
    }
    // Top-k rule: an edge exists if either endpoint ranks the other within
    // its k best scores; everything tied with the k-th score is included.
    for (auto& [firm, partners] : ranked) {
        std::sort(partners.begin(), partners.end(),
                  [](const auto& x, const auto& y) {
                      return x.first > y.first || (x.first == y.first && x.second < y.second);
                  });
        const std::size_t kk = std::min<std::size_t>(k, partners.size());
        if (kk == 0) continue;
        const double cutoff = partners[kk - 1].first;
        for (const auto& [score, other] : partners) {
            if (score < cutoff) break;
            edges[canon(firm, other)] = scores.at(canon(firm, other));
        }
    }

    return GraphSnapshot(period, std::move(edges), std::move(nodes));
}

void DynamicGraph::validate() const {
    int expect = 0;
    bool first = true;
    for (const auto& [period, snap] : snapshots) {
        if (!first && period != expect) {
            throw ValidationError("dynamic graph periods are not contiguous");
        }
        expect = period + 1;
        first = false;
    }
}

const GraphSnapshot& snapshot_at(const DynamicGraph& g, double t) {
    if (g.snapshots.empty()) throw OutOfWindow("dynamic graph has no snapshots");
    const int year = static_cast<int>(std::floor(t));
    auto it = g.snapshots.upper_bound(year);
    if (it == g.snapshots.begin()) {
        throw OutOfWindow("time before the first graph period");
    }
    return std::prev(it)->second;
}

void export_adjacency(const GraphSnapshot& snap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    const std::vector<FirmId> firms(snap.nodes().begin(), snap.nodes().end());
    for (std::size_t i = 0; i < firms.size(); ++i) {
        if (i > 0) out << ',';
        out << firms[i];
    }
    out << '\n';
    for (const auto& u : firms) {
        const auto& nbrs = snap.neighbors(u);
        for (std::size_t j = 0; j < firms.size(); ++j) {
            if (j > 0) out << ',';
            out << (nbrs.count(firms[j]) > 0 ? '1' : '0');
        }
        out << '\n';
    }
    if (!out) throw IoFailure("write failed for " + path);
}

std::pair<std::vector<FirmId>, std::set<std::pair<FirmId, FirmId>>> read_adjacency(
    const std::string& path) {
    const auto rows = io::read_csv(path);
    if (rows.empty()) return {{}, {}};
    const std::vector<FirmId> firms(rows[0].begin(), rows[0].end());
    std::set<std::pair<FirmId, FirmId>> edges;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != firms.size()) throw ValidationError("ragged adjacency matrix");
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] == "1") edges.insert(canon(firms[i - 1], firms[j]));
        }
    }
    return {firms, edges};
}

}  // namespace tdin::graph
