#pragma once

#include <functional>

#include "tdin/nn/param_store.hpp"
#include "tdin/nn/tape.hpp"

namespace tdin::nn {

// A differentiable scalar function of the store. When with_grad is set the
// callee must accumulate its analytic gradient into the store (which arrives
// zeroed); otherwise it must only return the value.
using LossFn = std::function<double(ParamStore&, bool with_grad)>;

// Central-difference check over every parameter entry. Returns the worst
// relative error between the analytic gradient and finite differences.
double grad_check(const LossFn& f, ParamStore& store, double eps = 1e-5);

// Forward-only evaluations of the tape composites, for callers that do not
// need gradients.
Tensor dense_forward(ParamStore& store, const std::string& layer, const Tensor& x);
Tensor rnn_step_forward(ParamStore& store, const std::string& layer, const Tensor& h_prev,
                        const Tensor& x);
Tensor aggregate(const std::vector<Tensor>& neighbor_embeddings);
Tensor combine_forward(ParamStore& store, const std::string& layer, const Tensor& self_emb,
                       const Tensor& agg);
std::vector<double> bilinear_softmax(const Tensor& z_focal,
                                     const std::vector<Tensor>& candidates,
                                     const Tensor& phi);

}  // namespace tdin::nn
