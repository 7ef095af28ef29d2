#pragma once

#include <map>
#include <string>

#include "tdin/data/synth.hpp"
#include "tdin/model/types.hpp"

namespace tdin {

// Flat key-value run configuration: one `key = value` per line, `#` comments.
class KvConfig {
  public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

  private:
    std::map<std::string, std::string> values_;
};

// Readers for the documented key groups ("world.*" and "model.*"); unset keys
// keep their defaults.
data::WorldConfig world_config_from(const KvConfig& cfg);
model::ModelConfig model_config_from(const KvConfig& cfg);

}  // namespace tdin
