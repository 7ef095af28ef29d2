#include "tdin/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tdin/errors.hpp"
#include "tdin/io/csv.hpp"

namespace tdin {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

KvConfig KvConfig::parse_string(const std::string& text) {
    KvConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is not key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ValidationError("config line " + std::to_string(lineno) + " has no key");
        }
        cfg.values_[key] = value;
    }
    return cfg;
}

std::string KvConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : io::parse_double(it->second, "config key " + key);
}

int KvConfig::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : io::parse_int(it->second, "config key " + key);
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key " + key + " is not a boolean");
}

data::WorldConfig world_config_from(const KvConfig& cfg) {
    data::WorldConfig w;
    w.n_firms = cfg.get_int("world.n_firms", w.n_firms);
    w.year0 = cfg.get_int("world.year0", w.year0);
    w.n_years = cfg.get_int("world.n_years", w.n_years);
    w.n_clusters = cfg.get_int("world.n_clusters", w.n_clusters);
    w.text_dim = cfg.get_int("world.text_dim", w.text_dim);
    w.k_top = cfg.get_int("world.k_top", w.k_top);
    w.threshold = cfg.get_double("world.threshold", w.threshold);
    w.base_bias = cfg.get_double("world.base_bias", w.base_bias);
    w.feat_weight_fin = cfg.get_double("world.feat_weight_fin", w.feat_weight_fin);
    w.feat_weight_txt = cfg.get_double("world.feat_weight_txt", w.feat_weight_txt);
    w.peer_weight = cfg.get_double("world.peer_weight", w.peer_weight);
    w.self_weight = cfg.get_double("world.self_weight", w.self_weight);
    w.omega_scale = cfg.get_double("world.omega_scale", w.omega_scale);
    w.omega_decay = cfg.get_double("world.omega_decay", w.omega_decay);
    w.phi_scale = cfg.get_double("world.phi_scale", w.phi_scale);
    w.feature_drift = cfg.get_double("world.feature_drift", w.feature_drift);
    w.sim_drift = cfg.get_double("world.sim_drift", w.sim_drift);
    w.sim_same_cluster = cfg.get_double("world.sim_same_cluster", w.sim_same_cluster);
    w.sim_cross_cluster = cfg.get_double("world.sim_cross_cluster", w.sim_cross_cluster);
    w.validate();
    return w;
}

model::ModelConfig model_config_from(const KvConfig& cfg) {
    model::ModelConfig m;
    m.d1 = cfg.get_int("model.d1", m.d1);
    m.d2 = cfg.get_int("model.d2", m.d2);
    m.mp_dim = cfg.get_int("model.mp_dim", m.mp_dim);
    m.text_dim = cfg.get_int("model.text_dim", m.text_dim);
    m.quad_nodes = cfg.get_int("model.quad_nodes", m.quad_nodes);
    m.choice_bce = cfg.get_bool("model.choice_bce", m.choice_bce);
    m.epochs = cfg.get_int("model.epochs", m.epochs);
    m.lr = cfg.get_double("model.lr", m.lr);
    m.init_scale = cfg.get_double("model.init_scale", m.init_scale);
    m.train_t_end = cfg.get_double("model.train_t_end", m.train_t_end);
    m.validate();
    return m;
}

}  // namespace tdin
