#include "tdin/model/train.hpp"

#include <algorithm>
#include <cmath>

#include "tdin/log.hpp"
#include "tdin/model/timeline.hpp"
#include "tdin/nn/adam.hpp"
#include "tdin/pp/likelihood.hpp"

namespace tdin::model {

TrainResult train(const data::Dataset& ds, const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (ds.frequent.empty()) throw ValidationError("train: dataset has no frequent acquirers");
    const Timelines timelines = build_timelines(ds);

    TrainResult result;
    result.params = init_params(cfg, seed);
    nn::Adam adam({.lr = cfg.lr});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        result.params.zero_grads();
        const Losses losses = total_loss(result.params, ds, timelines, cfg, true);
        if (!std::isfinite(losses.total())) {
            throw DivergenceDetected("loss diverged at epoch " + std::to_string(epoch) +
                                     ": timing=" + std::to_string(losses.timing_nll) +
                                     " choice=" + std::to_string(losses.choice_loss));
        }
        result.history.push_back(losses);
        adam.step(result.params);
        if (epoch % 20 == 0) {
            log::debug("epoch " + std::to_string(epoch) + " timing=" +
                       std::to_string(losses.timing_nll) + " choice=" +
                       std::to_string(losses.choice_loss));
        }
    }
    return result;
}

Prediction predict_next(nn::ParamStore& store, const data::Dataset& ds,
                        const Timelines& timelines, const graph::FirmId& d, double t_c,
                        double horizon) {
    auto it = timelines.find(d);
    if (it == timelines.end()) throw UnknownAcquirer("no timeline for acquirer " + d);

    const FrozenIntensity frozen = freeze_intensity(store, ds, it->second, t_c);
    Prediction pred;
    pred.t_hat = pp::expected_next_time(frozen, t_c, horizon, 512);

    const auto choice = choice_distribution(store, ds, d, pred.t_hat);
    pred.targets.reserve(choice.candidates.size());
    for (std::size_t i = 0; i < choice.candidates.size(); ++i) {
        pred.targets.emplace_back(choice.candidates[i], choice.probs[i]);
    }
    std::sort(pred.targets.begin(), pred.targets.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return pred;
}

}  // namespace tdin::model
