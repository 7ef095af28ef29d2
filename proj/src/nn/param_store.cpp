#include "tdin/nn/param_store.hpp"

#include <algorithm>

namespace tdin::nn {

Tensor& ParamStore::add(const std::string& name, std::vector<std::size_t> shape) {
    if (has(name)) throw ValidationError("duplicate parameter name: " + name);
    grads_[name] = Tensor::zeros(shape);
    auto [it, ok] = params_.emplace(name, Tensor::zeros(std::move(shape)));
    (void)ok;
    return it->second;
}

Tensor& ParamStore::param(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ValidationError("unknown parameter: " + name);
    return it->second;
}

const Tensor& ParamStore::param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ValidationError("unknown parameter: " + name);
    return it->second;
}

Tensor& ParamStore::grad(const std::string& name) {
    auto it = grads_.find(name);
    if (it == grads_.end()) throw ValidationError("unknown parameter: " + name);
    return it->second;
}

const Tensor& ParamStore::grad(const std::string& name) const {
    auto it = grads_.find(name);
    if (it == grads_.end()) throw ValidationError("unknown parameter: " + name);
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& [name, g] : grads_) {
        std::fill(g.data.begin(), g.data.end(), 0.0);
    }
}

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(params_.size());
    for (const auto& [name, t] : params_) out.push_back(name);
    return out;  // std::map keeps them sorted
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& [name, t] : params_) n += t.size();
    return n;
}

nlohmann::json ParamStore::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, t] : params_) {
        j[name] = {{"shape", t.shape}, {"data", t.data}};
    }
    return j;
}

ParamStore ParamStore::from_json(const nlohmann::json& j) {
    ParamStore store;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto shape = it.value().at("shape").get<std::vector<std::size_t>>();
        auto data = it.value().at("data").get<std::vector<double>>();
        Tensor& t = store.add(it.key(), shape);
        if (data.size() != t.size()) {
            throw ValidationError("parameter data/shape mismatch for " + it.key());
        }
        t.data = std::move(data);
    }
    return store;
}

}  // namespace tdin::nn
