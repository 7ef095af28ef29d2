#pragma once

#include <cstdint>
#include <string>

#include "tdin/data/records.hpp"
#include "tdin/model/types.hpp"
#include "tdin/nn/param_store.hpp"

namespace tdin::data {

// Configuration of a synthetic world: firms with clustered text embeddings
// and drifting similarity, random-walk accounting features, and deals drawn
// from a planted model by thinning.
struct WorldConfig {
    int n_firms = 20;
    int year0 = 1997;
    int n_years = 24;
    int n_clusters = 4;
    int text_dim = 8;
    int k_top = 3;
    double threshold = 0.5;

    // Planted intensity knobs. The base bias sets the resting rate inside the
    // softplus; peer/self weights scale the recurrent channels; the omega pair
    // is the gap-decay term.
    double base_bias = -0.6;
    double feat_weight_fin = 0.6;
    double feat_weight_txt = 0.2;
    double peer_weight = 1.0;
    double self_weight = 1.0;
    double omega_scale = 0.6;
    double omega_decay = 2.0;
    double phi_scale = 2.0;  // 0 plants a uniform choice distribution

    // Drifts.
    double feature_drift = 0.25;
    double sim_drift = 0.02;
    double sim_same_cluster = 0.45;
    double sim_cross_cluster = 0.06;

    void validate() const;  // throws InfeasibleConfig

    nlohmann::json to_json() const;
    static WorldConfig from_json(const nlohmann::json& j);
};

struct SynthResult {
    Dataset dataset;               // ready to train on
    model::ModelConfig planted_cfg;
    nn::ParamStore planted;        // the generating parameters
};

// Deterministic given the seed. The generated deals pass the majority-
// takeover filter by construction.
SynthResult synth_generate(const WorldConfig& cfg, std::uint64_t seed);

// Writes the raw input files (deals.csv, features.csv, embeddings.jsonl,
// similarity.csv) plus world_truth.json with the planted parameters.
void save_world(const SynthResult& world, const WorldConfig& cfg, const std::string& dir);

}  // namespace tdin::data
