#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tdin/nn/param_store.hpp"

namespace tdin::nn {

// Reverse-mode tape over the fixed op set the model needs: affine maps, tanh,
// permutation-invariant mean, concat, dot products, softplus/exp/log scalar
// chains, softmax, and the bilinear compatibility head. Values are computed
// eagerly; backward() walks the tape once and flushes parameter gradients
// into their stores.
//
// Tapes are cheap to reset and are meant to be rebuilt per loss term.
class Tape {
  public:
    using Id = std::int32_t;

    void reset();

    // --- leaves ---
    Id input(std::span<const double> v);
    Id scalar(double v);
    Id zeros(std::size_t n);
    // Parameter leaf; repeated requests for the same (store, name) within one
    // tape return the same node.
    Id param(ParamStore& store, const std::string& name);

    // --- primitives ---
    Id matvec(Id w, Id x, std::size_t rows, std::size_t cols);
    Id add(Id a, Id b);
    Id tanh_op(Id x);
    Id mean(std::span<const Id> xs);  // element-wise mean, order-canonical sum
    Id concat(Id a, Id b);
    Id dot(Id a, Id b);
    Id scale(Id x, double c);
    Id exp_op(Id x);
    Id log_op(Id x);
    Id one_minus(Id x);
    Id softplus(Id x);
    Id mul(Id a, Id b);
    Id pick(Id x, std::size_t index);
    Id sum_all(Id x);
    Id weighted_sum(std::span<const Id> xs, std::span<const double> ws);
    Id softmax(Id logits);  // max-shifted
    Id bilinear_logits(Id z_focal, Id phi, std::span<const Id> zs);

    // --- composites ---
    // tanh(W x + b) with parameters "<layer>.W" and "<layer>.b".
    Id dense(ParamStore& store, const std::string& layer, Id x);
    // tanh(Whh h + Wxh x + b) with "<layer>.Whh", "<layer>.Wxh", "<layer>.b".
    Id rnn_step(ParamStore& store, const std::string& layer, Id h_prev, Id x);
    // tanh(W concat(self, agg) + b); same parameter convention as dense.
    Id combine(ParamStore& store, const std::string& layer, Id self_emb, Id agg);
    // softmax over z_focal^T phi z_v for each candidate v.
    Id bilinear_softmax(Id z_focal, std::span<const Id> candidates, Id phi);

    // --- inspection ---
    std::size_t size_of(Id id) const;
    std::vector<double> value(Id id) const;
    double scalar_value(Id id) const;
    std::size_t node_count() const { return nodes_.size(); }

    // Seeds the (scalar) root with gradient 1, walks the tape in reverse, and
    // adds parameter gradients into their stores.
    void backward(Id root);

  private:
    enum class Op : std::uint8_t {
        kInput,
        kParam,
        kMatVec,
        kAdd,
        kTanh,
        kMean,
        kConcat,
        kDot,
        kScale,
        kExp,
        kLog,
        kOneMinus,
        kSoftplus,
        kMul,
        kPick,
        kSumAll,
        kWeightedSum,
        kSoftmax,
        kBilinearLogits,
    };

    struct Node {
        Op op;
        std::uint32_t voff = 0;    // value offset in the arena
        std::uint32_t vlen = 0;    // value length
        std::uint32_t pstart = 0;  // parents offset
        std::uint32_t pcount = 0;  // parent count
        std::uint32_t iarg = 0;    // op-specific: rows / pick index / aux offset / param ref
        std::uint32_t iarg2 = 0;   // op-specific: cols
        double darg = 0.0;         // op-specific: scale constant
    };

    Id push(Op op, std::size_t vlen, std::span<const Id> parents);
    double* val_ptr(Id id) { return values_.data() + nodes_[id].voff; }
    const double* val_ptr(Id id) const { return values_.data() + nodes_[id].voff; }
    const Node& node(Id id) const;
    void check_same_len(Id a, Id b, const char* what) const;

    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<Id> parents_;
    std::vector<double> aux_;
    std::vector<std::pair<ParamStore*, std::string>> param_refs_;
    std::map<std::pair<const ParamStore*, std::string>, Id> param_cache_;
};

}  // namespace tdin::nn
