#include "tdin/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tdin/data/preprocess.hpp"
#include "tdin/data/dataset.hpp"
#include "tdin/model/model.hpp"
#include "tdin/nn/grad_check.hpp"
#include "tdin/pp/thinning.hpp"
#include "tdin/rng.hpp"

namespace tdin::data {

namespace {

double softplus_val(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
    if (y > 30.0) return y;
    return std::log(std::expm1(std::max(y, 1e-10)));
}

std::string firm_name(int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "F%03d", i);
    return std::string(buf);
}

// The generating parameters, expressed as an ordinary model instance.
// Channel 0 of the recurrent state accumulates peer activity, channel 1
// accumulates own activity and resets on feature updates.
nn::ParamStore plant_params(const WorldConfig& cfg) {
    nn::ParamStore store;
    auto& fin_w = store.add("fin_enc.W", {1, kAccountingCount});
    fin_w.data[0] = cfg.feat_weight_fin;  // reads the Size column
    store.add("fin_enc.b", {1});
    auto& txt_w = store.add("txt_enc.W", {1, static_cast<std::size_t>(cfg.text_dim)});
    txt_w.data[0] = cfg.feat_weight_txt;
    store.add("txt_enc.b", {1}).data[0] = 1.5;

    auto& whh = store.add("rnn.Whh", {2, 2});
    whh.data[0] = 0.55;
    whh.data[3] = 0.55;
    auto& wxh = store.add("rnn.Wxh", {2, 3});  // input: (gap, kind, similarity)
    wxh.data[1] = 1.2;   // peer channel: kicked by peer (and feature) records
    wxh.data[4] = -1.5;  // self channel: +1.5 - 1.5*kind leaves peers neutral
    auto& rb = store.add("rnn.b", {2});
    rb.data[1] = 1.5;

    auto& mp1 = store.add("mp1.W", {2, 4});
    mp1.data[0] = 0.5;
    mp1.data[2] = 0.5;
    mp1.data[5] = 0.5;
    mp1.data[7] = 0.5;
    store.add("mp1.b", {2});
    auto& mp2 = store.add("mp2.W", {2, 4});
    mp2.data = mp1.data;
    store.add("mp2.b", {2});

    auto& we = store.add("w_e", {2});
    we.data[0] = 1.0;
    we.data[1] = cfg.base_bias / std::tanh(1.5);  // text channel carries the bias
    auto& wc = store.add("w_c", {2});
    wc.data[0] = cfg.peer_weight;
    wc.data[1] = cfg.self_weight;
    store.add("w_o1", {1}).data[0] = cfg.omega_scale;
    store.add("w_o2_raw", {1}).data[0] = softplus_inv(cfg.omega_decay);
    auto& phi = store.add("phi", {2, 2});
    phi.data[0] = cfg.phi_scale;
    phi.data[3] = cfg.phi_scale;
    return store;
}

struct FirmState {
    std::vector<double> h{0.0, 0.0};
    double t_last = 0.0;
    double feat_term = 0.0;  // w_e . e for the current period
    double peer_self_term = 0.0;  // w_c . h
};

}  // namespace

void WorldConfig::validate() const {
    if (n_firms < 2) throw InfeasibleConfig("world needs at least 2 firms");
    if (n_years < 2) throw InfeasibleConfig("world needs at least 2 years");
    if (n_clusters < 1 || n_clusters > n_firms) throw InfeasibleConfig("bad cluster count");
    if (text_dim < 1) throw InfeasibleConfig("text_dim must be >= 1");
    if (k_top < 1) throw InfeasibleConfig("k_top must be >= 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InfeasibleConfig("bad threshold");
    if (!(omega_decay > 0.0)) throw InfeasibleConfig("omega_decay must be positive");
    if (!(feature_drift >= 0.0) || !(sim_drift >= 0.0)) {
        throw InfeasibleConfig("drifts must be non-negative");
    }
    // The softplus argument is bounded by construction; reject worlds whose
    // ceiling rate is still absurd.
    const double arg_max = 1.0 + std::fabs(base_bias) / std::tanh(1.5) +
                           std::fabs(peer_weight) + std::fabs(self_weight) +
                           std::fabs(omega_scale);
    if (n_firms * softplus_val(arg_max) > 1000.0) {
        throw InfeasibleConfig("planted intensity ceiling exceeds 1000 events/year");
    }
}

nlohmann::json WorldConfig::to_json() const {
    return nlohmann::json{{"n_firms", n_firms},
                          {"year0", year0},
                          {"n_years", n_years},
                          {"n_clusters", n_clusters},
                          {"text_dim", text_dim},
                          {"k_top", k_top},
                          {"threshold", threshold},
                          {"base_bias", base_bias},
                          {"feat_weight_fin", feat_weight_fin},
                          {"feat_weight_txt", feat_weight_txt},
                          {"peer_weight", peer_weight},
                          {"self_weight", self_weight},
                          {"omega_scale", omega_scale},
                          {"omega_decay", omega_decay},
                          {"phi_scale", phi_scale},
                          {"feature_drift", feature_drift},
                          {"sim_drift", sim_drift},
                          {"sim_same_cluster", sim_same_cluster},
                          {"sim_cross_cluster", sim_cross_cluster}};
}

WorldConfig WorldConfig::from_json(const nlohmann::json& j) {
    WorldConfig cfg;
    cfg.n_firms = j.value("n_firms", cfg.n_firms);
    cfg.year0 = j.value("year0", cfg.year0);
    cfg.n_years = j.value("n_years", cfg.n_years);
    cfg.n_clusters = j.value("n_clusters", cfg.n_clusters);
    cfg.text_dim = j.value("text_dim", cfg.text_dim);
    cfg.k_top = j.value("k_top", cfg.k_top);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.base_bias = j.value("base_bias", cfg.base_bias);
    cfg.feat_weight_fin = j.value("feat_weight_fin", cfg.feat_weight_fin);
    cfg.feat_weight_txt = j.value("feat_weight_txt", cfg.feat_weight_txt);
    cfg.peer_weight = j.value("peer_weight", cfg.peer_weight);
    cfg.self_weight = j.value("self_weight", cfg.self_weight);
    cfg.omega_scale = j.value("omega_scale", cfg.omega_scale);
    cfg.omega_decay = j.value("omega_decay", cfg.omega_decay);
    cfg.phi_scale = j.value("phi_scale", cfg.phi_scale);
    cfg.feature_drift = j.value("feature_drift", cfg.feature_drift);
    cfg.sim_drift = j.value("sim_drift", cfg.sim_drift);
    cfg.sim_same_cluster = j.value("sim_same_cluster", cfg.sim_same_cluster);
    cfg.sim_cross_cluster = j.value("sim_cross_cluster", cfg.sim_cross_cluster);
    cfg.validate();
    return cfg;
}

SynthResult synth_generate(const WorldConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);

    SynthResult out;
    Dataset& ds = out.dataset;
    ds.year0 = cfg.year0;
    ds.n_years = cfg.n_years;
    ds.k_top = cfg.k_top;
    ds.threshold = cfg.threshold;

    std::vector<graph::FirmId> firms;
    std::vector<int> cluster(cfg.n_firms);
    for (int i = 0; i < cfg.n_firms; ++i) {
        firms.push_back(firm_name(i));
        cluster[i] = i % cfg.n_clusters;
    }

    // Cluster anchors for the text space.
    std::vector<std::vector<double>> anchors(cfg.n_clusters,
                                             std::vector<double>(cfg.text_dim));
    for (auto& a : anchors) {
        for (double& v : a) v = rng.normal(0.0, 1.0);
    }

    // Features: random walks per firm; text embeddings drift around the
    // cluster anchor.
    for (int i = 0; i < cfg.n_firms; ++i) {
        std::vector<double> acct(kAccountingCount);
        for (double& v : acct) v = rng.normal(0.0, 1.0);
        std::vector<double> txt = anchors[cluster[i]];
        for (double& v : txt) v += rng.normal(0.0, 0.3);
        for (int p = 0; p < cfg.n_years; ++p) {
            FirmFeatures f;
            f.firm = firms[i];
            f.period = cfg.year0 + p;
            f.accounting = acct;
            f.text_embedding = txt;
            ds.features.put(std::move(f));
            acct[0] += rng.normal(0.0, cfg.feature_drift);  // the Size signal
            for (std::size_t c = 1; c < kAccountingCount; ++c) {
                acct[c] += rng.normal(0.0, 0.1);
            }
            for (double& v : txt) v += rng.normal(0.0, 0.05);
        }
    }

    // Similarity: clustered base level plus a slow AR(1) wiggle; one year of
    // lead-in before the window, none for the final year.
    std::vector<graph::SimilarityRecord> sims;
    for (int i = 0; i < cfg.n_firms; ++i) {
        for (int j = i + 1; j < cfg.n_firms; ++j) {
            const double base = cluster[i] == cluster[j] ? cfg.sim_same_cluster
                                                         : cfg.sim_cross_cluster;
            double wiggle = rng.normal(0.0, cfg.sim_drift);
            for (int p = -1; p < cfg.n_years - 1; ++p) {
                const double score = std::clamp(base + wiggle, 0.001, 0.999);
                sims.push_back({firms[i], firms[j], cfg.year0 + p, score});
                wiggle = 0.9 * wiggle + rng.normal(0.0, cfg.sim_drift);
            }
        }
    }
    ds.graph = build_graph(sims, cfg.k_top, cfg.threshold);

    // Planted model.
    out.planted = plant_params(cfg);
    out.planted_cfg = model::ModelConfig{};
    out.planted_cfg.d1 = 2;
    out.planted_cfg.d2 = 2;
    out.planted_cfg.mp_dim = 2;
    out.planted_cfg.text_dim = cfg.text_dim;

    // Per-firm, per-period contribution of the intrinsic embedding.
    std::vector<std::vector<double>> feat_term(cfg.n_firms,
                                               std::vector<double>(cfg.n_years));
    const auto& we = out.planted.param("w_e").data;
    const auto& wc = out.planted.param("w_c").data;
    for (int i = 0; i < cfg.n_firms; ++i) {
        for (int p = 0; p < cfg.n_years; ++p) {
            const auto e = model::intrinsic_embedding(
                out.planted, *ds.features.find(firms[i], cfg.year0 + p));
            feat_term[i][p] = we[0] * e[0] + we[1] * e[1];
        }
    }

    const double w1 = cfg.omega_scale;
    const double w2 = cfg.omega_decay;

    // Choice distributions are constant within a period; cache per firm-year.
    std::map<std::pair<int, int>, model::ChoiceResult> choice_cache;
    auto choice_for = [&](int firm_idx, int period_idx) -> const model::ChoiceResult& {
        const auto key = std::make_pair(firm_idx, period_idx);
        auto it = choice_cache.find(key);
        if (it == choice_cache.end()) {
            it = choice_cache
                     .emplace(key, model::choice_distribution(out.planted, ds,
                                                              firms[firm_idx],
                                                              period_idx + 0.5))
                     .first;
        }
        return it->second;
    };

    // Superposed-process state shared by the thinning closures.
    std::vector<FirmState> st(cfg.n_firms);
    std::map<graph::FirmId, int> firm_index;
    for (int i = 0; i < cfg.n_firms; ++i) {
        st[i].feat_term = feat_term[i][0];
        firm_index[firms[i]] = i;
    }
    int current_year = 0;
    std::size_t processed = 0;
    Rng attr_rng(seed ^ 0x9E3779B97F4A7C15ULL);

    auto lambda_of = [&](int i, double t) {
        return softplus_val(st[i].feat_term + st[i].peer_self_term +
                            w1 * std::exp(-w2 * (t - st[i].t_last)));
    };

    auto fold_record = [&](int i, double t, model::EventKind kind, double sim) {
        const std::array<double, 3> x{t - st[i].t_last, static_cast<double>(kind), sim};
        const auto h = nn::rnn_step_forward(out.planted, "rnn", nn::Tensor::vec(st[i].h),
                                            nn::Tensor::vec({x[0], x[1], x[2]}));
        st[i].h = h.data;
        st[i].t_last = t;
        st[i].peer_self_term = wc[0] * st[i].h[0] + wc[1] * st[i].h[1];
    };

    // Feature updates at period boundaries up to and including time t.
    auto advance_years = [&](double t) {
        while (current_year + 1 < cfg.n_years &&
               static_cast<double>(current_year + 1) <= t) {
            ++current_year;
            for (int i = 0; i < cfg.n_firms; ++i) {
                fold_record(i, static_cast<double>(current_year),
                            model::EventKind::kFeatureUpdate, 0.0);
                st[i].feat_term = feat_term[i][current_year];
            }
        }
    };

    // Attributes any newly accepted superposition events to firms and draws
    // their targets.
    auto sync_events = [&](const std::vector<double>& hist) {
        while (processed < hist.size()) {
            const double t = hist[processed];
            advance_years(t);
            const auto& snap = graph::snapshot_at(ds.graph, ds.to_calendar(t));
            std::vector<double> lam(cfg.n_firms);
            double total = 0.0;
            for (int i = 0; i < cfg.n_firms; ++i) {
                lam[i] = lambda_of(i, t);
                total += lam[i];
            }
            double u = attr_rng.uniform01() * total;
            int d = 0;
            for (; d + 1 < cfg.n_firms; ++d) {
                if (u < lam[d]) break;
                u -= lam[d];
            }
            const auto& choice = choice_for(d, current_year);
            double uv = attr_rng.uniform01();
            std::size_t v = 0;
            for (; v + 1 < choice.probs.size(); ++v) {
                if (uv < choice.probs[v]) break;
                uv -= choice.probs[v];
            }
            const graph::FirmId target = choice.candidates[v];

            DealRecord deal;
            deal.acquirer = firms[d];
            deal.target = target;
            deal.t = t;
            deal.pct_acquired = 100.0;
            deal.pct_after = 100.0;
            deal.value_musd = 2.0 + 30.0 * attr_rng.uniform01();
            deal.deal_type = "merger";
            ds.deals.push_back(std::move(deal));

            fold_record(d, t, model::EventKind::kSelf,
                        snap.edge_score(firms[d], target));
            for (const auto& nb : snap.neighbors(firms[d])) {
                const int j = firm_index.at(nb);
                fold_record(j, t, model::EventKind::kPeer,
                            snap.edge_score(nb, firms[d]));
            }
            ++processed;
        }
    };

    pp::HistoryIntensity lambda_total = [&](const std::vector<double>& hist, double t) {
        sync_events(hist);
        double total = 0.0;
        for (int i = 0; i < cfg.n_firms; ++i) total += lambda_of(i, t);
        return total;
    };

    pp::BoundProvider bound = [&](const std::vector<double>& hist,
                                  double t) -> pp::ThinningBound {
        sync_events(hist);
        advance_years(t);
        double b = 0.0;
        for (int i = 0; i < cfg.n_firms; ++i) {
            // Between records only the gap term moves, monotonically, so the
            // ceiling is at the current gap or in the decayed limit.
            const double resting = softplus_val(st[i].feat_term + st[i].peer_self_term);
            b += std::max(lambda_of(i, t), resting);
        }
        const double next_break = std::min(static_cast<double>(current_year + 1),
                                           static_cast<double>(cfg.n_years));
        return {b, next_break - t};
    };

    const auto seq = pp::simulate_thinning(lambda_total, bound,
                                           {0.0, static_cast<double>(cfg.n_years)}, seed);
    sync_events(seq.times);

    ds.deals = filter_deals(ds.deals);  // no-op by construction
    ds.frequent = frequent_acquirers(ds.deals, 4);
    return out;
}

void save_world(const SynthResult& world, const WorldConfig& cfg, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const Dataset& ds = world.dataset;
    save_deals_csv(ds.deals, dir + "/deals.csv", ds.year0);
    save_features_csv(ds.features, dir + "/features.csv");
    save_embeddings_jsonl(ds.features, dir + "/embeddings.jsonl");

    std::vector<graph::SimilarityRecord> sims;
    for (const auto& [period, snap] : ds.graph.snapshots) {
        for (const auto& [pair, score] : snap.edges()) {
            sims.push_back({pair.first, pair.second, period, score});
        }
    }
    save_similarity_csv(sims, dir + "/similarity.csv");

    nlohmann::json truth;
    truth["world"] = cfg.to_json();
    truth["planted_config"] = world.planted_cfg.to_json();
    truth["planted_params"] = world.planted.to_json();
    std::ofstream out(dir + "/world_truth.json");
    if (!out) throw IoFailure("cannot write " + dir + "/world_truth.json");
    out << truth.dump(2) << '\n';
    if (!out) throw IoFailure("write failed for " + dir + "/world_truth.json");
}

}  // namespace tdin::data
