#pragma once

#include <map>
#include <string>
#include <vector>

#include "tdin/nn/param_store.hpp"

namespace tdin::nn {

// Adaptive moment estimation over a ParamStore. The single optimizer used by
// every fitting routine in the repo.
class Adam {
  public:
    struct Options {
        double lr = 0.01;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
    };

    Adam() = default;
    explicit Adam(const Options& opts) : opts_(opts) {}

    // One descent step using the gradients currently held by the store.
    void step(ParamStore& store) {
        ++t_;
        const double bc1 = 1.0 - std::pow(opts_.beta1, t_);
        const double bc2 = 1.0 - std::pow(opts_.beta2, t_);
        for (const auto& name : store.names()) {
            auto& p = store.param(name).data;
            const auto& g = store.grad(name).data;
            auto& [m, v] = state_[name];
            if (m.size() != p.size()) {
                m.assign(p.size(), 0.0);
                v.assign(p.size(), 0.0);
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g[i];
                v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * g[i] * g[i];
                const double mh = m[i] / bc1;
                const double vh = v[i] / bc2;
                p[i] -= opts_.lr * mh / (std::sqrt(vh) + opts_.eps);
            }
        }
    }

  private:
    Options opts_;
    int t_ = 0;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> state_;
};

}  // namespace tdin::nn
