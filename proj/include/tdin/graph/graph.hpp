#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tdin/errors.hpp"

namespace tdin::graph {

using FirmId = std::string;

// One pairwise similarity observation for one period (calendar year).
struct SimilarityRecord {
    FirmId firm_a;
    FirmId firm_b;
    int period = 0;
    double score = 0.0;
};

// Industry network at one period. Edges are undirected and carry the
// similarity score; nodes are every firm that appears in a record.
class GraphSnapshot {
  public:
    GraphSnapshot() = default;
    GraphSnapshot(int period, std::map<std::pair<FirmId, FirmId>, double> edges,
                  std::set<FirmId> nodes);

    int period() const { return period_; }
    const std::set<FirmId>& nodes() const { return nodes_; }
    const std::map<std::pair<FirmId, FirmId>, double>& edges() const { return edges_; }

    bool has_node(const FirmId& firm) const { return nodes_.count(firm) > 0; }

    // All firms sharing an edge with the given firm. Throws UnknownFirm for
    // firms outside the snapshot.
    const std::set<FirmId>& neighbors(const FirmId& firm) const;

    // Edge score, or 0 when the pair is not connected.
    double edge_score(const FirmId& u, const FirmId& v) const;

    std::size_t edge_count() const { return edges_.size(); }

  private:
    int period_ = 0;
    std::map<std::pair<FirmId, FirmId>, double> edges_;  // key: (min, max)
    std::set<FirmId> nodes_;
    std::map<FirmId, std::set<FirmId>> adjacency_;
};

// Edge rule: a pair is connected if either endpoint ranks the other within
// its top-k scores (ties at rank k included), or if the score clears the
// absolute threshold.
GraphSnapshot build_snapshot(const std::vector<SimilarityRecord>& records, int period,
                             int k, double threshold);

struct DynamicGraph {
    std::map<int, GraphSnapshot> snapshots;

    // Throws unless the stored periods form a contiguous run.
    void validate() const;
};

// Snapshot governing continuous time t (in calendar years): the most recent
// period at or before floor(t). Throws OutOfWindow before the first period.
const GraphSnapshot& snapshot_at(const DynamicGraph& g, double t);

// Dense 0/1 adjacency CSV: header row of firm ids in lexicographic order,
// then one row per firm in the same order. Symmetric with zero diagonal.
void export_adjacency(const GraphSnapshot& snap, const std::string& path);

// Inverse of export_adjacency, for round-trip checks: returns firm ids and
// the set of connected (min, max) pairs.
std::pair<std::vector<FirmId>, std::set<std::pair<FirmId, FirmId>>> read_adjacency(
    const std::string& path);

}  // namespace tdin::graph
