#include "tdin/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tdin/errors.hpp"
#include "tdin/model/timeline.hpp"
#include "tdin/rng.hpp"

namespace tdin::model {

namespace {

using nn::Tape;

constexpr double kGlX = 0.7745966692414834;  // 3-point Gauss-Legendre on [-1, 1]
constexpr double kGlW0 = 5.0 / 9.0;
constexpr double kGlW1 = 8.0 / 9.0;

void fill_normal(nn::Tensor& t, Rng& rng, double scale) {
    for (double& v : t.data) v = rng.normal(0.0, scale);
}

// Feature row for a firm during the piece starting at period `year`.
const data::FirmFeatures& features_for(const data::Dataset& ds, const graph::FirmId& firm,
                                       int year) {
    const auto* f = ds.features.find_at_or_before(firm, year);
    if (f == nullptr) {
        throw DimensionMismatch("no features for firm " + firm + " at or before " +
                                std::to_string(year));
    }
    return *f;
}

// omega(gap) = w_o1 * exp(-softplus(w_o2_raw) * gap)
Tape::Id omega_node(Tape& tape, nn::ParamStore& store, Tape::Id w2_pos, double gap) {
    return tape.mul(tape.param(store, "w_o1"), tape.exp_op(tape.scale(w2_pos, -gap)));
}

// Shared per-piece context for the timing intensity: everything except the
// gap term is constant between two consecutive records.
struct PieceContext {
    Tape::Id base;    // w_e . e + w_c . c
    Tape::Id w2_pos;  // softplus(w_o2_raw)
};

Tape::Id piece_intensity(Tape& tape, nn::ParamStore& store, const PieceContext& ctx,
                         double gap) {
    return tape.softplus(tape.add(ctx.base, omega_node(tape, store, ctx.w2_pos, gap)));
}

}  // namespace

void ModelConfig::validate() const {
    if (d1 < 2 || d1 % 2 != 0) throw ValidationError("d1 must be even and >= 2");
    if (d2 < 1) throw ValidationError("d2 must be >= 1");
    if (mp_dim < 1) throw ValidationError("mp_dim must be >= 1");
    if (text_dim < 1) throw ValidationError("text_dim must be >= 1");
    if (quad_nodes < 3) throw ValidationError("quad_nodes must be >= 3");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (!(lr > 0.0)) throw ValidationError("lr must be positive");
    if (!(init_scale > 0.0)) throw ValidationError("init_scale must be positive");
}

nlohmann::json ModelConfig::to_json() const {
    return nlohmann::json{{"d1", d1},
                          {"d2", d2},
                          {"mp_dim", mp_dim},
                          {"text_dim", text_dim},
                          {"quad_nodes", quad_nodes},
                          {"choice_bce", choice_bce},
                          {"epochs", epochs},
                          {"lr", lr},
                          {"init_scale", init_scale},
                          {"train_t_end", train_t_end}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.d1 = j.at("d1").get<int>();
    cfg.d2 = j.at("d2").get<int>();
    cfg.mp_dim = j.at("mp_dim").get<int>();
    cfg.text_dim = j.at("text_dim").get<int>();
    cfg.quad_nodes = j.value("quad_nodes", 64);
    cfg.choice_bce = j.value("choice_bce", true);
    cfg.epochs = j.value("epochs", 200);
    cfg.lr = j.value("lr", 0.02);
    cfg.init_scale = j.value("init_scale", 0.1);
    cfg.train_t_end = j.value("train_t_end", -1.0);
    cfg.validate();
    return cfg;
}

nn::ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    nn::ParamStore store;
    const std::size_t half = static_cast<std::size_t>(cfg.d1) / 2;
    const std::size_t d2 = static_cast<std::size_t>(cfg.d2);
    const std::size_t mp = static_cast<std::size_t>(cfg.mp_dim);

    fill_normal(store.add("fin_enc.W", {half, data::kAccountingCount}), rng, cfg.init_scale);
    store.add("fin_enc.b", {half});
    fill_normal(store.add("txt_enc.W", {half, static_cast<std::size_t>(cfg.text_dim)}), rng,
                cfg.init_scale);
    store.add("txt_enc.b", {half});
    fill_normal(store.add("rnn.Whh", {d2, d2}), rng, cfg.init_scale);
    fill_normal(store.add("rnn.Wxh", {d2, 3}), rng, cfg.init_scale);
    store.add("rnn.b", {d2});
    fill_normal(store.add("mp1.W", {mp, 2 * static_cast<std::size_t>(cfg.d1)}), rng,
                cfg.init_scale);
    store.add("mp1.b", {mp});
    fill_normal(store.add("mp2.W", {mp, 2 * mp}), rng, cfg.init_scale);
    store.add("mp2.b", {mp});
    fill_normal(store.add("w_e", {static_cast<std::size_t>(cfg.d1)}), rng, cfg.init_scale);
    fill_normal(store.add("w_c", {d2}), rng, cfg.init_scale);
    store.add("w_o1", {1}).data[0] = 0.1;
    // softplus(0.5413) is about 1: unit gap decay out of the box
    store.add("w_o2_raw", {1}).data[0] = 0.5413;
    fill_normal(store.add("phi", {mp, mp}), rng, cfg.init_scale);
    return store;
}

Tape::Id intrinsic_embedding_node(Tape& tape, nn::ParamStore& store,
                                  const data::FirmFeatures& f) {
    const auto& fin_w = store.param("fin_enc.W");
    const auto& txt_w = store.param("txt_enc.W");
    if (f.accounting.size() != fin_w.cols()) {
        throw DimensionMismatch("accounting vector length does not match the encoder");
    }
    if (f.text_embedding.size() != txt_w.cols()) {
        throw DimensionMismatch("text embedding length does not match the projection");
    }
    const Tape::Id fin = tape.dense(store, "fin_enc", tape.input(f.accounting));
    const Tape::Id txt = tape.dense(store, "txt_enc", tape.input(f.text_embedding));
    return tape.concat(fin, txt);
}

Tape::Id extrinsic_embedding_node(Tape& tape, nn::ParamStore& store,
                                  const AcquirerTimeline& timeline, double t) {
    Tape::Id h = tape.zeros(store.param("rnn.b").size());
    double prev = 0.0;
    for (const auto& rec : timeline.records) {
        if (!(rec.t < t)) break;
        const auto x = event_embedding(prev, rec);
        h = tape.rnn_step(store, "rnn", h, tape.input(x));
        prev = rec.t;
    }
    return h;
}

Tape::Id timing_intensity_node(Tape& tape, nn::ParamStore& store, Tape::Id e, Tape::Id c,
                               double gap) {
    if (gap < 0.0) throw NegativeGap("timing intensity with negative gap");
    PieceContext ctx{
        tape.add(tape.dot(tape.param(store, "w_e"), e), tape.dot(tape.param(store, "w_c"), c)),
        tape.softplus(tape.param(store, "w_o2_raw"))};
    return piece_intensity(tape, store, ctx, gap);
}

ChoiceEmbeddings choice_embeddings(Tape& tape, nn::ParamStore& store, const data::Dataset& ds,
                                   const graph::GraphSnapshot& snap, int period) {
    ChoiceEmbeddings out;
    for (const auto& firm : snap.nodes()) {
        if (ds.features.find(firm, period) != nullptr) out.firms.push_back(firm);
    }
    if (out.firms.empty()) return out;

    std::map<graph::FirmId, std::size_t> index;
    for (std::size_t i = 0; i < out.firms.size(); ++i) index[out.firms[i]] = i;

    std::vector<Tape::Id> e(out.firms.size());
    for (std::size_t i = 0; i < out.firms.size(); ++i) {
        e[i] = intrinsic_embedding_node(tape, store, *ds.features.find(out.firms[i], period));
    }

    // Neighbor lists restricted to firms with features this period. Isolated
    // nodes aggregate over themselves.
    std::vector<std::vector<std::size_t>> nbrs(out.firms.size());
    for (std::size_t i = 0; i < out.firms.size(); ++i) {
        for (const auto& nb : snap.neighbors(out.firms[i])) {
            auto it = index.find(nb);
            if (it != index.end()) nbrs[i].push_back(it->second);
        }
        if (nbrs[i].empty()) nbrs[i].push_back(i);
    }

    auto pass = [&](const std::string& layer, const std::vector<Tape::Id>& in) {
        std::vector<Tape::Id> h(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) {
            std::vector<Tape::Id> neigh;
            neigh.reserve(nbrs[i].size());
            for (std::size_t j : nbrs[i]) neigh.push_back(in[j]);
            h[i] = tape.combine(store, layer, in[i], tape.mean(neigh));
        }
        return h;
    };

    out.z = pass("mp2", pass("mp1", e));
    return out;
}

std::vector<double> intrinsic_embedding(nn::ParamStore& store, const data::FirmFeatures& f) {
    Tape tape;
    return tape.value(intrinsic_embedding_node(tape, store, f));
}

std::vector<double> extrinsic_embedding(nn::ParamStore& store, const AcquirerTimeline& timeline,
                                        double t) {
    Tape tape;
    return tape.value(extrinsic_embedding_node(tape, store, timeline, t));
}

double timing_intensity(nn::ParamStore& store, const std::vector<double>& e,
                        const std::vector<double>& c, double gap) {
    Tape tape;
    return tape.scalar_value(
        timing_intensity_node(tape, store, tape.input(e), tape.input(c), gap));
}

ChoiceResult choice_distribution(nn::ParamStore& store, const data::Dataset& ds,
                                 const graph::FirmId& d, double t) {
    const auto& snap = graph::snapshot_at(ds.graph, ds.to_calendar(t));
    if (!snap.has_node(d)) throw UnknownAcquirer("acquirer " + d + " not in snapshot");
    Tape tape;
    const auto emb = choice_embeddings(tape, store, ds, snap, ds.period_of(t));

    ChoiceResult res;
    std::vector<Tape::Id> cand_z;
    Tape::Id z_d = -1;
    for (std::size_t i = 0; i < emb.firms.size(); ++i) {
        if (emb.firms[i] == d) {
            z_d = emb.z[i];
        } else {
            res.candidates.push_back(emb.firms[i]);
            cand_z.push_back(emb.z[i]);
        }
    }
    if (z_d < 0) throw UnknownAcquirer("acquirer " + d + " has no features this period");
    if (cand_z.empty()) throw EmptyCandidatePool("no candidate targets at this time");

    const Tape::Id probs = tape.bilinear_softmax(z_d, cand_z, tape.param(store, "phi"));
    res.probs = tape.value(probs);
    return res;
}

double joint_intensity(nn::ParamStore& store, const data::Dataset& ds,
                       const Timelines& timelines, const graph::FirmId& d,
                       const graph::FirmId& v, double t) {
    auto tl = timelines.find(d);
    if (tl == timelines.end()) throw UnknownAcquirer("no timeline for acquirer " + d);

    const auto choice = choice_distribution(store, ds, d, t);
    const auto it = std::lower_bound(choice.candidates.begin(), choice.candidates.end(), v);
    if (it == choice.candidates.end() || *it != v) {
        throw CandidateNotAvailable("firm " + v + " is not an available target");
    }
    const double p = choice.probs[static_cast<std::size_t>(it - choice.candidates.begin())];

    Tape tape;
    double prev = 0.0;
    for (const auto& rec : tl->second.records) {
        if (!(rec.t < t)) break;
        prev = rec.t;
    }
    const Tape::Id e = intrinsic_embedding_node(
        tape, store, features_for(ds, d, ds.period_of(t)));
    const Tape::Id c = extrinsic_embedding_node(tape, store, tl->second, t);
    const double lam = tape.scalar_value(timing_intensity_node(tape, store, e, c, t - prev));
    return lam * p;
}

namespace {

// Timing negative log-likelihood of one acquirer: event terms at the self
// events plus the quadrature of the intensity from the window start to the
// last self event.
Tape::Id timing_term(Tape& tape, nn::ParamStore& store, const data::Dataset& ds,
                     const AcquirerTimeline& timeline, const ModelConfig& cfg,
                     double t_train_end) {
    double t_last_self = -1.0;
    for (const auto& rec : timeline.records) {
        if (rec.t <= t_train_end && rec.kind == EventKind::kSelf) t_last_self = rec.t;
    }
    if (t_last_self < 0.0) return -1;  // no self events: no timing term

    const Tape::Id w2_pos = tape.softplus(tape.param(store, "w_o2_raw"));
    const Tape::Id w_e = tape.param(store, "w_e");
    const Tape::Id w_c = tape.param(store, "w_c");
    const int n_sub = std::max(1, cfg.quad_nodes / 3);

    std::vector<Tape::Id> terms;
    std::vector<double> weights;

    Tape::Id h = tape.zeros(store.param("rnn.b").size());
    std::map<int, Tape::Id> e_cache;
    double prev = 0.0;
    for (const auto& rec : timeline.records) {
        if (rec.t > t_last_self) break;
        const double t0 = prev;
        const double t1 = rec.t;
        if (t1 > t0) {
            const int year = ds.period_of(t0);
            auto e_it = e_cache.find(year);
            if (e_it == e_cache.end()) {
                e_it = e_cache
                           .emplace(year, intrinsic_embedding_node(
                                              tape, store,
                                              features_for(ds, timeline.acquirer, year)))
                           .first;
            }
            const PieceContext ctx{
                tape.add(tape.dot(w_e, e_it->second), tape.dot(w_c, h)), w2_pos};

            const double hsub = (t1 - t0) / n_sub;
            for (int k = 0; k < n_sub; ++k) {
                const double c0 = t0 + k * hsub + 0.5 * hsub;
                const double hw = 0.5 * hsub;
                terms.push_back(piece_intensity(tape, store, ctx, c0 - hw * kGlX - t0));
                weights.push_back(hw * kGlW0);
                terms.push_back(piece_intensity(tape, store, ctx, c0 - t0));
                weights.push_back(hw * kGlW1);
                terms.push_back(piece_intensity(tape, store, ctx, c0 + hw * kGlX - t0));
                weights.push_back(hw * kGlW0);
            }

            if (rec.kind == EventKind::kSelf) {
                const Tape::Id lam = piece_intensity(tape, store, ctx, t1 - t0);
                terms.push_back(tape.log_op(lam));
                weights.push_back(-1.0);
            }
        } else if (rec.kind == EventKind::kSelf) {
            // Zero-length piece (record at the window start): event term only.
            const int year = ds.period_of(t0);
            auto e_it = e_cache.find(year);
            if (e_it == e_cache.end()) {
                e_it = e_cache
                           .emplace(year, intrinsic_embedding_node(
                                              tape, store,
                                              features_for(ds, timeline.acquirer, year)))
                           .first;
            }
            const PieceContext ctx{
                tape.add(tape.dot(w_e, e_it->second), tape.dot(w_c, h)), w2_pos};
            terms.push_back(tape.log_op(piece_intensity(tape, store, ctx, 0.0)));
            weights.push_back(-1.0);
        }

        h = tape.rnn_step(store, "rnn", h, tape.input(event_embedding(prev, rec)));
        prev = rec.t;
    }
    return tape.weighted_sum(terms, weights);
}

struct ChoiceEvent {
    double t;
    graph::FirmId acquirer;
    graph::FirmId target;
};

// Choice loss of all self events inside one period: the per-firm embeddings
// are shared across the period's events.
Tape::Id choice_term(Tape& tape, nn::ParamStore& store, const data::Dataset& ds, int period,
                     const std::vector<ChoiceEvent>& events, const ModelConfig& cfg) {
    const auto& snap =
        graph::snapshot_at(ds.graph, static_cast<double>(period) + 0.5);
    const auto emb = choice_embeddings(tape, store, ds, snap, period);
    std::map<graph::FirmId, std::size_t> index;
    for (std::size_t i = 0; i < emb.firms.size(); ++i) index[emb.firms[i]] = i;

    const Tape::Id phi = tape.param(store, "phi");
    std::vector<Tape::Id> losses;
    std::vector<double> ones;
    for (const auto& ev : events) {
        auto d_it = index.find(ev.acquirer);
        if (d_it == index.end()) {
            throw UnknownAcquirer("acquirer " + ev.acquirer + " missing from choice pool");
        }
        std::vector<Tape::Id> cand_z;
        std::size_t true_idx = emb.firms.size();
        for (std::size_t i = 0; i < emb.firms.size(); ++i) {
            if (emb.firms[i] == ev.acquirer) continue;
            if (emb.firms[i] == ev.target) true_idx = cand_z.size();
            cand_z.push_back(emb.z[i]);
        }
        if (cand_z.empty()) throw EmptyCandidatePool("no candidates for a self event");
        if (true_idx >= cand_z.size()) {
            throw CandidateNotAvailable("target " + ev.target + " not in the candidate pool");
        }
        const Tape::Id probs = tape.bilinear_softmax(emb.z[d_it->second], cand_z, phi);
        if (cfg.choice_bce) {
            // Mean binary cross-entropy over the candidate pool with a
            // one-hot label at the realized target.
            const Tape::Id logp = tape.log_op(probs);
            const Tape::Id log1m = tape.log_op(tape.one_minus(probs));
            const Tape::Id pos = tape.pick(logp, true_idx);
            const Tape::Id neg =
                tape.add(tape.sum_all(log1m), tape.scale(tape.pick(log1m, true_idx), -1.0));
            const std::array<Tape::Id, 2> parts{pos, neg};
            const std::array<double, 2> ws{-1.0 / static_cast<double>(cand_z.size()),
                                           -1.0 / static_cast<double>(cand_z.size())};
            losses.push_back(tape.weighted_sum(parts, ws));
        } else {
            losses.push_back(tape.scale(tape.log_op(tape.pick(probs, true_idx)), -1.0));
        }
        ones.push_back(1.0);
    }
    return tape.weighted_sum(losses, ones);
}

}  // namespace

Losses total_loss(nn::ParamStore& store, const data::Dataset& ds, const Timelines& timelines,
                  const ModelConfig& cfg, bool with_grad) {
    cfg.validate();
    const double t_train_end = cfg.train_t_end > 0.0
                                   ? std::min(cfg.train_t_end, ds.t_end())
                                   : ds.t_end();
    Losses out;
    Tape tape;

    for (const auto& [firm, timeline] : timelines) {
        tape.reset();
        const Tape::Id term = timing_term(tape, store, ds, timeline, cfg, t_train_end);
        if (term < 0) continue;
        out.timing_nll += tape.scalar_value(term);
        if (with_grad) tape.backward(term);
    }

    // Self events grouped by period; events ordered by (t, acquirer).
    std::map<int, std::vector<ChoiceEvent>> by_period;
    for (const auto& [firm, timeline] : timelines) {
        for (const auto& rec : timeline.records) {
            if (rec.kind != EventKind::kSelf || rec.t > t_train_end) continue;
            by_period[ds.period_of(rec.t) - ds.year0].push_back(
                {rec.t, firm, rec.target.value()});
        }
    }
    for (auto& [p, events] : by_period) {
        std::sort(events.begin(), events.end(), [](const ChoiceEvent& a, const ChoiceEvent& b) {
            if (a.t != b.t) return a.t < b.t;
            return a.acquirer < b.acquirer;
        });
        tape.reset();
        const Tape::Id term =
            choice_term(tape, store, ds, ds.year0 + p, events, cfg);
        out.choice_loss += tape.scalar_value(term);
        if (with_grad) tape.backward(term);
    }
    return out;
}

double FrozenIntensity::value(double t) const {
    const double x = base_ + w1_ * std::exp(-w2_ * (t - t_last_));
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

FrozenIntensity freeze_intensity(nn::ParamStore& store, const data::Dataset& ds,
                                 const AcquirerTimeline& timeline, double t_c) {
    // Only information available strictly before t_c: the last closed feature
    // period and the records before t_c.
    const int year = ds.period_of(t_c - 1e-9);
    double t_last = 0.0;
    for (const auto& rec : timeline.records) {
        if (!(rec.t < t_c)) break;
        t_last = rec.t;
    }
    Tape tape;
    const Tape::Id e =
        intrinsic_embedding_node(tape, store, features_for(ds, timeline.acquirer, year));
    const Tape::Id c = extrinsic_embedding_node(tape, store, timeline, t_c);
    const double base = tape.scalar_value(tape.add(
        tape.dot(tape.param(store, "w_e"), e), tape.dot(tape.param(store, "w_c"), c)));
    const double w1 = store.param("w_o1").data[0];
    const double w2_raw = store.param("w_o2_raw").data[0];
    const double w2 = w2_raw > 30.0 ? w2_raw : std::log1p(std::exp(w2_raw));
    return FrozenIntensity(base, w1, w2, t_last);
}

void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const nn::ParamStore& store) {
    nlohmann::json j;
    j["config"] = cfg.to_json();
    j["params"] = store.to_json();
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoFailure("write failed for " + path);
}

std::pair<ModelConfig, nn::ParamStore> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return {ModelConfig::from_json(j.at("config")), nn::ParamStore::from_json(j.at("params"))};
}

}  // namespace tdin::model
