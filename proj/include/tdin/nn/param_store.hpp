#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdin/nn/tensor.hpp"

namespace tdin::nn {

// Named parameters with mirrored gradient accumulators. Iteration order is
// the sorted name order everywhere, so reductions stay deterministic.
class ParamStore {
  public:
    Tensor& add(const std::string& name, std::vector<std::size_t> shape);

    bool has(const std::string& name) const { return params_.count(name) > 0; }

    Tensor& param(const std::string& name);
    const Tensor& param(const std::string& name) const;

    Tensor& grad(const std::string& name);
    const Tensor& grad(const std::string& name) const;

    void zero_grads();

    std::vector<std::string> names() const;

    std::size_t total_size() const;

    nlohmann::json to_json() const;
    static ParamStore from_json(const nlohmann::json& j);

  private:
    std::map<std::string, Tensor> params_;
    std::map<std::string, Tensor> grads_;
};

}  // namespace tdin::nn
