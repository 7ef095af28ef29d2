#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdin/graph/graph.hpp"

namespace tdin::model {

// Event kinds on an acquirer's timeline. The integer values are part of the
// event-embedding encoding.
enum class EventKind : int { kSelf = 0, kPeer = 1, kFeatureUpdate = 2 };

struct EventRecord {
    double t = 0.0;
    EventKind kind = EventKind::kSelf;
    double similarity = 0.0;                 // 0 for feature updates
    std::optional<graph::FirmId> target;     // present iff kSelf
};

struct AcquirerTimeline {
    graph::FirmId acquirer;
    std::vector<EventRecord> records;  // strictly increasing t
};

using Timelines = std::map<graph::FirmId, AcquirerTimeline>;

struct ModelConfig {
    int d1 = 8;        // intrinsic embedding size; half financial, half text
    int d2 = 16;       // recurrent hidden size (extrinsic embedding size)
    int mp_dim = 8;    // message-passing output size
    int text_dim = 8;  // input dimension of the precomputed text embeddings
    int quad_nodes = 64;      // intensity-integral evaluations per smooth piece
    bool choice_bce = true;   // false: plain categorical cross-entropy

    int epochs = 200;
    double lr = 0.02;
    double init_scale = 0.1;
    double train_t_end = -1.0;  // years since window start; <= 0 means full window

    void validate() const;

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
};

}  // namespace tdin::model
