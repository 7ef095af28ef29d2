#include "tdin/nn/grad_check.hpp"

#include <cmath>

namespace tdin::nn {

double grad_check(const LossFn& f, ParamStore& store, double eps) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) {
        throw ValidationError("grad_check eps must lie in [1e-7, 1e-3]");
    }
    store.zero_grads();
    f(store, true);
    // Snapshot the analytic gradient before the finite-difference sweep.
    std::map<std::string, std::vector<double>> analytic;
    for (const auto& name : store.names()) analytic[name] = store.grad(name).data;

    double worst = 0.0;
    for (const auto& name : store.names()) {
        auto& p = store.param(name).data;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double saved = p[i];
            p[i] = saved + eps;
            const double fp = f(store, false);
            p[i] = saved - eps;
            const double fm = f(store, false);
            p[i] = saved;
            const double fd = (fp - fm) / (2.0 * eps);
            const double an = analytic[name][i];
            const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
            if (std::fabs(fd) < 1e-12 && std::fabs(an) < 1e-12) continue;
            worst = std::max(worst, std::fabs(fd - an) / denom);
        }
    }
    return worst;
}

Tensor dense_forward(ParamStore& store, const std::string& layer, const Tensor& x) {
    Tape tape;
    const auto out = tape.value(tape.dense(store, layer, tape.input(x.data)));
    return Tensor::vec(out);
}

Tensor rnn_step_forward(ParamStore& store, const std::string& layer, const Tensor& h_prev,
                        const Tensor& x) {
    Tape tape;
    const auto out = tape.value(
        tape.rnn_step(store, layer, tape.input(h_prev.data), tape.input(x.data)));
    return Tensor::vec(out);
}

Tensor aggregate(const std::vector<Tensor>& neighbor_embeddings) {
    Tape tape;
    std::vector<Tape::Id> ids;
    ids.reserve(neighbor_embeddings.size());
    for (const auto& t : neighbor_embeddings) ids.push_back(tape.input(t.data));
    return Tensor::vec(tape.value(tape.mean(ids)));
}

Tensor combine_forward(ParamStore& store, const std::string& layer, const Tensor& self_emb,
                       const Tensor& agg) {
    Tape tape;
    const auto out = tape.value(
        tape.combine(store, layer, tape.input(self_emb.data), tape.input(agg.data)));
    return Tensor::vec(out);
}

std::vector<double> bilinear_softmax(const Tensor& z_focal,
                                     const std::vector<Tensor>& candidates,
                                     const Tensor& phi) {
    Tape tape;
    std::vector<Tape::Id> ids;
    ids.reserve(candidates.size());
    for (const auto& t : candidates) ids.push_back(tape.input(t.data));
    return tape.value(tape.bilinear_softmax(tape.input(z_focal.data), ids,
                                            tape.input(phi.data)));
}

}  // namespace tdin::nn
