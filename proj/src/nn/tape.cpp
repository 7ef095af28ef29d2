#include "tdin/nn/tape.hpp"

#include <algorithm>
#include <cmath>

namespace tdin::nn {

namespace {

double stable_softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

void Tape::reset() {
    nodes_.clear();
    values_.clear();
    grads_.clear();
    parents_.clear();
    aux_.clear();
    param_refs_.clear();
    param_cache_.clear();
}

const Tape::Node& Tape::node(Id id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw ValidationError("bad tape node id");
    }
    return nodes_[id];
}

void Tape::check_same_len(Id a, Id b, const char* what) const {
    if (node(a).vlen != node(b).vlen) {
        throw ShapeMismatch(std::string(what) + ": operand lengths differ");
    }
}

Tape::Id Tape::push(Op op, std::size_t vlen, std::span<const Id> parents) {
    Node n;
    n.op = op;
    n.voff = static_cast<std::uint32_t>(values_.size());
    n.vlen = static_cast<std::uint32_t>(vlen);
    n.pstart = static_cast<std::uint32_t>(parents_.size());
    n.pcount = static_cast<std::uint32_t>(parents.size());
    for (Id p : parents) {
        (void)node(p);  // validate
        parents_.push_back(p);
    }
    values_.resize(values_.size() + vlen, 0.0);
    nodes_.push_back(n);
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::input(std::span<const double> v) {
    const Id id = push(Op::kInput, v.size(), {});
    std::copy(v.begin(), v.end(), val_ptr(id));
    return id;
}

Tape::Id Tape::scalar(double v) { return input(std::span<const double>(&v, 1)); }

Tape::Id Tape::zeros(std::size_t n) { return push(Op::kInput, n, {}); }

Tape::Id Tape::param(ParamStore& store, const std::string& name) {
    const auto key = std::make_pair(static_cast<const ParamStore*>(&store), name);
    auto it = param_cache_.find(key);
    if (it != param_cache_.end()) return it->second;
    const Tensor& t = store.param(name);
    const Id id = push(Op::kParam, t.size(), {});
    std::copy(t.data.begin(), t.data.end(), val_ptr(id));
    nodes_[id].iarg = static_cast<std::uint32_t>(param_refs_.size());
    param_refs_.emplace_back(&store, name);
    param_cache_.emplace(key, id);
    return id;
}

Tape::Id Tape::matvec(Id w, Id x, std::size_t rows, std::size_t cols) {
    if (node(w).vlen != rows * cols) throw ShapeMismatch("matvec: matrix size mismatch");
    if (node(x).vlen != cols) throw ShapeMismatch("matvec: vector size mismatch");
    const Id parents[] = {w, x};
    const Id id = push(Op::kMatVec, rows, parents);
    nodes_[id].iarg = static_cast<std::uint32_t>(rows);
    nodes_[id].iarg2 = static_cast<std::uint32_t>(cols);
    const double* wp = val_ptr(w);
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* row = wp + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * xp[c];
        out[r] = acc;
    }
    return id;
}

Tape::Id Tape::add(Id a, Id b) {
    check_same_len(a, b, "add");
    const Id parents[] = {a, b};
    const Id id = push(Op::kAdd, node(a).vlen, parents);
    const double* ap = val_ptr(a);
    const double* bp = val_ptr(b);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = ap[i] + bp[i];
    return id;
}

Tape::Id Tape::tanh_op(Id x) {
    const Id parents[] = {x};
    const Id id = push(Op::kTanh, node(x).vlen, parents);
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = std::tanh(xp[i]);
    return id;
}

Tape::Id Tape::mean(std::span<const Id> xs) {
    if (xs.empty()) throw EmptyNeighborhood("mean over an empty set");
    const std::size_t len = node(xs[0]).vlen;
    for (Id x : xs) {
        if (node(x).vlen != len) throw ShapeMismatch("mean: mixed lengths");
    }
    const Id id = push(Op::kMean, len, xs);
    double* out = val_ptr(id);
    // Summing the sorted addends makes the result independent of input order,
    // so the op is permutation-invariant exactly, not just up to rounding.
    std::vector<double> col(xs.size());
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t k = 0; k < xs.size(); ++k) col[k] = val_ptr(xs[k])[i];
        std::sort(col.begin(), col.end());
        double acc = 0.0;
        for (double v : col) acc += v;
        out[i] = acc / static_cast<double>(xs.size());
    }
    return id;
}

Tape::Id Tape::concat(Id a, Id b) {
    const Id parents[] = {a, b};
    const Id id = push(Op::kConcat, node(a).vlen + node(b).vlen, parents);
    double* out = val_ptr(id);
    std::copy(val_ptr(a), val_ptr(a) + node(a).vlen, out);
    std::copy(val_ptr(b), val_ptr(b) + node(b).vlen, out + node(a).vlen);
    return id;
}

Tape::Id Tape::dot(Id a, Id b) {
    check_same_len(a, b, "dot");
    const Id parents[] = {a, b};
    const Id id = push(Op::kDot, 1, parents);
    const double* ap = val_ptr(a);
    const double* bp = val_ptr(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < node(a).vlen; ++i) acc += ap[i] * bp[i];
    *val_ptr(id) = acc;
    return id;
}

Tape::Id Tape::scale(Id x, double c) {
    const Id parents[] = {x};
    const Id id = push(Op::kScale, node(x).vlen, parents);
    nodes_[id].darg = c;
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = c * xp[i];
    return id;
}

Tape::Id Tape::exp_op(Id x) {
    const Id parents[] = {x};
    const Id id = push(Op::kExp, node(x).vlen, parents);
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = std::exp(xp[i]);
    return id;
}

Tape::Id Tape::log_op(Id x) {
    const Id parents[] = {x};
    const Id id = push(Op::kLog, node(x).vlen, parents);
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) {
        out[i] = std::log(std::max(xp[i], 1e-300));
    }
    return id;
}

Tape::Id Tape::one_minus(Id x) {
    const Id parents[] = {x};
    const Id id = push(Op::kOneMinus, node(x).vlen, parents);
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = 1.0 - xp[i];
    return id;
}

Tape::Id Tape::softplus(Id x) {
    const Id parents[] = {x};
    const Id id = push(Op::kSoftplus, node(x).vlen, parents);
    const double* xp = val_ptr(x);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = stable_softplus(xp[i]);
    return id;
}

Tape::Id Tape::mul(Id a, Id b) {
    check_same_len(a, b, "mul");
    const Id parents[] = {a, b};
    const Id id = push(Op::kMul, node(a).vlen, parents);
    const double* ap = val_ptr(a);
    const double* bp = val_ptr(b);
    double* out = val_ptr(id);
    for (std::size_t i = 0; i < node(id).vlen; ++i) out[i] = ap[i] * bp[i];
    return id;
}

Tape::Id Tape::pick(Id x, std::size_t index) {
    if (index >= node(x).vlen) throw ShapeMismatch("pick: index out of range");
    const Id parents[] = {x};
    const Id id = push(Op::kPick, 1, parents);
    nodes_[id].iarg = static_cast<std::uint32_t>(index);
    *val_ptr(id) = val_ptr(x)[index];
    return id;
}

Tape::Id Tape::sum_all(Id x) {
    const Id parents[] = {x};
    const Id id = push(Op::kSumAll, 1, parents);
    const double* xp = val_ptr(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < node(x).vlen; ++i) acc += xp[i];
    *val_ptr(id) = acc;
    return id;
}

Tape::Id Tape::weighted_sum(std::span<const Id> xs, std::span<const double> ws) {
    if (xs.size() != ws.size()) throw ShapeMismatch("weighted_sum: length mismatch");
    for (Id x : xs) {
        if (node(x).vlen != 1) throw ShapeMismatch("weighted_sum: scalar terms required");
    }
    const Id id = push(Op::kWeightedSum, 1, xs);
    nodes_[id].iarg = static_cast<std::uint32_t>(aux_.size());
    aux_.insert(aux_.end(), ws.begin(), ws.end());
    double acc = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) acc += ws[k] * *val_ptr(xs[k]);
    *val_ptr(id) = acc;
    return id;
}

Tape::Id Tape::softmax(Id logits) {
    const std::size_t n = node(logits).vlen;
    if (n == 0) throw EmptyCandidateSet("softmax over an empty set");
    const Id parents[] = {logits};
    const Id id = push(Op::kSoftmax, n, parents);
    const double* lp = val_ptr(logits);
    double* out = val_ptr(id);
    double mx = lp[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, lp[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(lp[i] - mx);
        z += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= z;
    return id;
}

Tape::Id Tape::bilinear_logits(Id z_focal, Id phi, std::span<const Id> zs) {
    if (zs.empty()) throw EmptyCandidateSet("bilinear_logits: no candidates");
    const std::size_t m = node(z_focal).vlen;
    if (node(phi).vlen != m * m) throw ShapeMismatch("bilinear_logits: phi must be m x m");
    std::vector<Id> parents;
    parents.reserve(zs.size() + 2);
    parents.push_back(z_focal);
    parents.push_back(phi);
    for (Id z : zs) {
        if (node(z).vlen != m) throw ShapeMismatch("bilinear_logits: candidate size");
        parents.push_back(z);
    }
    const Id id = push(Op::kBilinearLogits, zs.size(), parents);
    nodes_[id].iarg = static_cast<std::uint32_t>(m);
    const double* zf = val_ptr(z_focal);
    const double* ph = val_ptr(phi);
    double* out = val_ptr(id);
    // left = phi^T z_focal, so each logit is a single dot product
    std::vector<double> left(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) left[c] += zf[r] * ph[r * m + c];
    }
    for (std::size_t v = 0; v < zs.size(); ++v) {
        const double* zv = val_ptr(zs[v]);
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c) acc += left[c] * zv[c];
        out[v] = acc;
    }
    return id;
}

Tape::Id Tape::dense(ParamStore& store, const std::string& layer, Id x) {
    const Tensor& w = store.param(layer + ".W");
    const Id wid = param(store, layer + ".W");
    const Id bid = param(store, layer + ".b");
    const Id lin = add(matvec(wid, x, w.rows(), w.cols()), bid);
    return tanh_op(lin);
}

Tape::Id Tape::rnn_step(ParamStore& store, const std::string& layer, Id h_prev, Id x) {
    const Tensor& whh = store.param(layer + ".Whh");
    const Tensor& wxh = store.param(layer + ".Wxh");
    const Id hh = matvec(param(store, layer + ".Whh"), h_prev, whh.rows(), whh.cols());
    const Id xh = matvec(param(store, layer + ".Wxh"), x, wxh.rows(), wxh.cols());
    const Id lin = add(add(hh, xh), param(store, layer + ".b"));
    return tanh_op(lin);
}

Tape::Id Tape::combine(ParamStore& store, const std::string& layer, Id self_emb, Id agg) {
    return dense(store, layer, concat(self_emb, agg));
}

Tape::Id Tape::bilinear_softmax(Id z_focal, std::span<const Id> candidates, Id phi) {
    return softmax(bilinear_logits(z_focal, phi, candidates));
}

std::size_t Tape::size_of(Id id) const { return node(id).vlen; }

std::vector<double> Tape::value(Id id) const {
    const Node& n = node(id);
    return std::vector<double>(values_.begin() + n.voff, values_.begin() + n.voff + n.vlen);
}

double Tape::scalar_value(Id id) const {
    if (node(id).vlen != 1) throw ShapeMismatch("scalar_value on a non-scalar node");
    return values_[node(id).voff];
}

void Tape::backward(Id root) {
    if (node(root).vlen != 1) throw ShapeMismatch("backward root must be scalar");
    grads_.assign(values_.size(), 0.0);
    grads_[nodes_[root].voff] = 1.0;

    for (Id id = root; id >= 0; --id) {
        const Node& n = nodes_[id];
        const double* g = grads_.data() + n.voff;
        bool any = false;
        for (std::size_t i = 0; i < n.vlen; ++i) {
            if (g[i] != 0.0) {
                any = true;
                break;
            }
        }
        if (!any) continue;
        const Id* par = parents_.data() + n.pstart;
        switch (n.op) {
            case Op::kInput:
                break;
            case Op::kParam: {
                auto& [store, name] = param_refs_[n.iarg];
                auto& gt = store->grad(name).data;
                for (std::size_t i = 0; i < n.vlen; ++i) gt[i] += g[i];
                break;
            }
            case Op::kMatVec: {
                const std::size_t rows = n.iarg, cols = n.iarg2;
                const Node& wn = nodes_[par[0]];
                const Node& xn = nodes_[par[1]];
                const double* wp = values_.data() + wn.voff;
                const double* xp = values_.data() + xn.voff;
                double* gw = grads_.data() + wn.voff;
                double* gx = grads_.data() + xn.voff;
                for (std::size_t r = 0; r < rows; ++r) {
                    const double gr = g[r];
                    if (gr == 0.0) continue;
                    const double* row = wp + r * cols;
                    double* gwrow = gw + r * cols;
                    for (std::size_t c = 0; c < cols; ++c) {
                        gwrow[c] += gr * xp[c];
                        gx[c] += gr * row[c];
                    }
                }
                break;
            }
            case Op::kAdd: {
                double* ga = grads_.data() + nodes_[par[0]].voff;
                double* gb = grads_.data() + nodes_[par[1]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) {
                    ga[i] += g[i];
                    gb[i] += g[i];
                }
                break;
            }
            case Op::kTanh: {
                const double* y = values_.data() + n.voff;
                double* gx = grads_.data() + nodes_[par[0]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case Op::kMean: {
                const double inv = 1.0 / static_cast<double>(n.pcount);
                for (std::size_t k = 0; k < n.pcount; ++k) {
                    double* gp = grads_.data() + nodes_[par[k]].voff;
                    for (std::size_t i = 0; i < n.vlen; ++i) gp[i] += g[i] * inv;
                }
                break;
            }
            case Op::kConcat: {
                const Node& an = nodes_[par[0]];
                const Node& bn = nodes_[par[1]];
                double* ga = grads_.data() + an.voff;
                double* gb = grads_.data() + bn.voff;
                for (std::size_t i = 0; i < an.vlen; ++i) ga[i] += g[i];
                for (std::size_t i = 0; i < bn.vlen; ++i) gb[i] += g[an.vlen + i];
                break;
            }
            case Op::kDot: {
                const Node& an = nodes_[par[0]];
                const Node& bn = nodes_[par[1]];
                const double* ap = values_.data() + an.voff;
                const double* bp = values_.data() + bn.voff;
                double* ga = grads_.data() + an.voff;
                double* gb = grads_.data() + bn.voff;
                for (std::size_t i = 0; i < an.vlen; ++i) {
                    ga[i] += g[0] * bp[i];
                    gb[i] += g[0] * ap[i];
                }
                break;
            }
            case Op::kScale: {
                double* gx = grads_.data() + nodes_[par[0]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) gx[i] += g[i] * n.darg;
                break;
            }
            case Op::kExp: {
                const double* y = values_.data() + n.voff;
                double* gx = grads_.data() + nodes_[par[0]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) gx[i] += g[i] * y[i];
                break;
            }
            case Op::kLog: {
                const double* x = values_.data() + nodes_[par[0]].voff;
                double* gx = grads_.data() + nodes_[par[0]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) {
                    gx[i] += g[i] / std::max(x[i], 1e-300);
                }
                break;
            }
            case Op::kOneMinus: {
                double* gx = grads_.data() + nodes_[par[0]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) gx[i] -= g[i];
                break;
            }
            case Op::kSoftplus: {
                const double* x = values_.data() + nodes_[par[0]].voff;
                double* gx = grads_.data() + nodes_[par[0]].voff;
                for (std::size_t i = 0; i < n.vlen; ++i) gx[i] += g[i] * stable_sigmoid(x[i]);
                break;
            }
            case Op::kMul: {
                const Node& an = nodes_[par[0]];
                const Node& bn = nodes_[par[1]];
                const double* ap = values_.data() + an.voff;
                const double* bp = values_.data() + bn.voff;
                double* ga = grads_.data() + an.voff;
                double* gb = grads_.data() + bn.voff;
                for (std::size_t i = 0; i < n.vlen; ++i) {
                    ga[i] += g[i] * bp[i];
                    gb[i] += g[i] * ap[i];
                }
                break;
            }
            case Op::kPick: {
                double* gx = grads_.data() + nodes_[par[0]].voff;
                gx[n.iarg] += g[0];
                break;
            }
            case Op::kSumAll: {
                const Node& xn = nodes_[par[0]];
                double* gx = grads_.data() + xn.voff;
                for (std::size_t i = 0; i < xn.vlen; ++i) gx[i] += g[0];
                break;
            }
            case Op::kWeightedSum: {
                const double* ws = aux_.data() + n.iarg;
                for (std::size_t k = 0; k < n.pcount; ++k) {
                    grads_[nodes_[par[k]].voff] += g[0] * ws[k];
                }
                break;
            }
            case Op::kSoftmax: {
                const double* p = values_.data() + n.voff;
                double* gl = grads_.data() + nodes_[par[0]].voff;
                double dotgp = 0.0;
                for (std::size_t i = 0; i < n.vlen; ++i) dotgp += g[i] * p[i];
                for (std::size_t i = 0; i < n.vlen; ++i) {
                    gl[i] += p[i] * (g[i] - dotgp);
                }
                break;
            }
            case Op::kBilinearLogits: {
                const std::size_t m = n.iarg;
                const Node& zfn = nodes_[par[0]];
                const Node& phn = nodes_[par[1]];
                const double* zf = values_.data() + zfn.voff;
                const double* ph = values_.data() + phn.voff;
                double* gzf = grads_.data() + zfn.voff;
                double* gph = grads_.data() + phn.voff;
                const std::size_t n_cand = n.pcount - 2;
                for (std::size_t v = 0; v < n_cand; ++v) {
                    const double gv = g[v];
                    if (gv == 0.0) continue;
                    const Node& zvn = nodes_[par[2 + v]];
                    const double* zv = values_.data() + zvn.voff;
                    double* gzv = grads_.data() + zvn.voff;
                    for (std::size_t r = 0; r < m; ++r) {
                        const double* row = ph + r * m;
                        double acc_f = 0.0;
                        for (std::size_t c = 0; c < m; ++c) {
                            acc_f += row[c] * zv[c];
                            gph[r * m + c] += gv * zf[r] * zv[c];
                            gzv[c] += gv * zf[r] * row[c];
                        }
                        gzf[r] += gv * acc_f;
                    }
                }
                break;
            }
        }
    }
}

}  // namespace tdin::nn
