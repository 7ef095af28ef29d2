#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tdin/model/model.hpp"

namespace tdin::model {

struct TrainResult {
    nn::ParamStore params;
    std::vector<Losses> history;  // one entry per epoch
};

// Full-batch gradient descent on timing NLL + choice loss. Deterministic
// given the seed. Throws DivergenceDetected if the loss leaves the reals.
TrainResult train(const data::Dataset& ds, const ModelConfig& cfg, std::uint64_t seed);

struct Prediction {
    double t_hat = 0.0;
    // Candidate targets with probabilities, best first.
    std::vector<std::pair<graph::FirmId, double>> targets;
};

// Expectation-based next-event time with the history frozen at t_c, plus the
// target ranking from the choice distribution at that time.
Prediction predict_next(nn::ParamStore& store, const data::Dataset& ds,
                        const Timelines& timelines, const graph::FirmId& d, double t_c,
                        double horizon);

}  // namespace tdin::model
