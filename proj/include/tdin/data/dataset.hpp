#pragma once

#include <string>
#include <vector>

#include "tdin/data/records.hpp"

namespace tdin::data {

// --- individual file formats ---

// deals.csv: acquirer,target,date,pct_acquired,pct_after,value_musd,deal_type
std::vector<DealRecord> load_deals_csv(const std::string& path, int year0);
void save_deals_csv(const std::vector<DealRecord>& deals, const std::string& path, int year0);

// features.csv: firm,year,<17 accounting columns>; empty cells are missing.
FeatureTable load_features_csv(const std::string& path);
void save_features_csv(const FeatureTable& table, const std::string& path);

// embeddings.jsonl: {"firm": ..., "year": ..., "vector": [...]} per line.
// Loading merges vectors into an existing table; every feature row must
// receive one, and all vectors must share one dimension.
void load_embeddings_jsonl(const std::string& path, FeatureTable& table);
void save_embeddings_jsonl(const FeatureTable& table, const std::string& path);

// similarity.csv: firm_a,firm_b,year,score
std::vector<graph::SimilarityRecord> load_similarity_csv(const std::string& path);
void save_similarity_csv(const std::vector<graph::SimilarityRecord>& records,
                         const std::string& path);

// One snapshot per distinct period in the records.
graph::DynamicGraph build_graph(const std::vector<graph::SimilarityRecord>& records,
                                int k_top, double threshold);

// --- preprocessing pipeline ---

struct PreprocessOptions {
    int k_top = 10;
    double threshold = 0.2;
    int min_deals = 4;
};

// Raw files to a ready Dataset: filter deals, derive the frequent-acquirer
// set, interpolate features, and build the graph. The window is inferred
// from the feature years.
Dataset preprocess(const std::string& deals_csv, const std::string& features_csv,
                   const std::string& embeddings_jsonl, const std::string& similarity_csv,
                   const PreprocessOptions& opts = {});

// --- processed dataset directory ---

// Writes deals.csv, features.csv, embeddings.jsonl, similarity.csv and
// meta.json (window, rules, frequent set) under dir.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace tdin::data
