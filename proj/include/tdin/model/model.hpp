#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdin/data/records.hpp"
#include "tdin/model/types.hpp"
#include "tdin/nn/param_store.hpp"
#include "tdin/nn/tape.hpp"
#include "tdin/pp/intensity.hpp"

namespace tdin::model {

// Fresh parameter set for the given sizes: weights drawn from a seeded
// normal, biases zero, and the gap-decay rate reparameterized through
// softplus so it stays positive.
nn::ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed);

// --- tape-level building blocks (training path) ---

// Intrinsic embedding: financial encoder output concatenated with the
// projected text embedding. The encoder is shared with the choice module.
nn::Tape::Id intrinsic_embedding_node(nn::Tape& tape, nn::ParamStore& store,
                                      const data::FirmFeatures& f);

// Extrinsic embedding: recurrent fold over the event embeddings of all
// records strictly before t, starting from the zero state.
nn::Tape::Id extrinsic_embedding_node(nn::Tape& tape, nn::ParamStore& store,
                                      const AcquirerTimeline& timeline, double t);

// softplus(w_e . e + w_c . c + w_o1 * exp(-softplus(w_o2) * gap)).
nn::Tape::Id timing_intensity_node(nn::Tape& tape, nn::ParamStore& store, nn::Tape::Id e,
                                   nn::Tape::Id c, double gap);

// Two message-passing passes over the snapshot for every firm present in
// both the snapshot and the period's feature table.
struct ChoiceEmbeddings {
    std::vector<graph::FirmId> firms;  // sorted
    std::vector<nn::Tape::Id> z;
};
ChoiceEmbeddings choice_embeddings(nn::Tape& tape, nn::ParamStore& store,
                                   const data::Dataset& ds,
                                   const graph::GraphSnapshot& snap, int period);

// --- plain-value surface ---

std::vector<double> intrinsic_embedding(nn::ParamStore& store, const data::FirmFeatures& f);
std::vector<double> extrinsic_embedding(nn::ParamStore& store,
                                        const AcquirerTimeline& timeline, double t);
double timing_intensity(nn::ParamStore& store, const std::vector<double>& e,
                        const std::vector<double>& c, double gap);

struct ChoiceResult {
    std::vector<graph::FirmId> candidates;  // sorted firm ids, acquirer excluded
    std::vector<double> probs;              // sums to 1
};

// Target distribution for acquirer d at time t (years since window start).
ChoiceResult choice_distribution(nn::ParamStore& store, const data::Dataset& ds,
                                 const graph::FirmId& d, double t);

// lambda_d(t, v) = lambda_d(t) * P_d(v | t).
double joint_intensity(nn::ParamStore& store, const data::Dataset& ds,
                       const Timelines& timelines, const graph::FirmId& d,
                       const graph::FirmId& v, double t);

// --- loss ---

struct Losses {
    double timing_nll = 0.0;
    double choice_loss = 0.0;
    double total() const { return timing_nll + choice_loss; }
};

// Full-dataset loss. With with_grad set, gradients are accumulated into the
// store (which must arrive zeroed). Deterministic reduction order: acquirers
// and periods ascending.
Losses total_loss(nn::ParamStore& store, const data::Dataset& ds, const Timelines& timelines,
                  const ModelConfig& cfg, bool with_grad);

// --- prediction-time intensity ---

// Intensity with everything frozen at t_c: embeddings fixed, only the
// gap-decay term varies. Smooth, so it carries no breakpoints.
class FrozenIntensity final : public pp::Intensity {
  public:
    FrozenIntensity(double base, double omega_scale, double omega_decay, double t_last)
        : base_(base), w1_(omega_scale), w2_(omega_decay), t_last_(t_last) {}

    double value(double t) const override;

    double t_last() const { return t_last_; }

  private:
    double base_;  // w_e . e + w_c . c
    double w1_;
    double w2_;
    double t_last_;
};

// Freezes acquirer d's intensity at t_c using only records strictly before
// t_c and the last feature period that closed before t_c.
FrozenIntensity freeze_intensity(nn::ParamStore& store, const data::Dataset& ds,
                                 const AcquirerTimeline& timeline, double t_c);

// --- checkpoint I/O ---

void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const nn::ParamStore& store);
std::pair<ModelConfig, nn::ParamStore> load_checkpoint(const std::string& path);

}  // namespace tdin::model
