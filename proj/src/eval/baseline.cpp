#include "tdin/eval/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdin/errors.hpp"
#include "tdin/nn/adam.hpp"
#include "tdin/nn/param_store.hpp"

namespace tdin::eval {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

std::vector<LabeledExample> build_baseline_features(const data::Dataset& ds, int year) {
    if (year + 1 > ds.year0 + ds.n_years - 1 || year < ds.year0) {
        throw ValidationError("baseline feature year outside the window");
    }
    if (year - 3 < ds.year0) {
        throw InsufficientHistory("baseline features need 3 years of history");
    }
    const double p = static_cast<double>(year - ds.year0);

    std::vector<LabeledExample> out;
    for (const auto& d : ds.frequent) {
        LabeledExample ex;
        ex.acquirer = d;
        ex.year = year;

        const auto* f = ds.features.find_at_or_before(d, year);
        if (f == nullptr) {
            throw ValidationError("no features for frequent acquirer " + d);
        }
        ex.features = f->accounting;

        // Mean similarity of the ten closest peers under this year's graph.
        const auto& snap = graph::snapshot_at(ds.graph, year + 0.5);
        double avg_sim = 0.0;
        if (snap.has_node(d)) {
            std::vector<double> scores;
            for (const auto& nb : snap.neighbors(d)) {
                scores.push_back(snap.edge_score(d, nb));
            }
            std::sort(scores.rbegin(), scores.rend());
            const std::size_t k = std::min<std::size_t>(10, scores.size());
            if (k > 0) {
                avg_sim = std::accumulate(scores.begin(), scores.begin() + k, 0.0) /
                          static_cast<double>(k);
            }
        }
        ex.features.push_back(avg_sim);

        // Lagged neighborhood activity, one count per look-back year.
        for (int lag = 1; lag <= 3; ++lag) {
            const int ly = year - lag;
            const double lp = static_cast<double>(ly - ds.year0);
            const auto& lsnap = graph::snapshot_at(ds.graph, ly + 0.5);
            int count = 0;
            if (lsnap.has_node(d)) {
                const auto& nbrs = lsnap.neighbors(d);
                for (const auto& deal : ds.deals) {
                    if (deal.t < lp || deal.t >= lp + 1.0) continue;
                    if (deal.acquirer != d && nbrs.count(deal.acquirer) > 0) ++count;
                }
            }
            ex.features.push_back(static_cast<double>(count));
        }

        ex.label = 0;
        for (const auto& deal : ds.deals) {
            if (deal.acquirer == d && deal.t > p + 1.0 && deal.t <= p + 2.0) {
                ex.label = 1;
                break;
            }
        }
        out.push_back(std::move(ex));
    }
    return out;
}

double LogisticParams::predict(const std::vector<double>& features) const {
    if (features.size() + 1 != beta.size()) {
        throw ValidationError("logistic predict: feature width mismatch");
    }
    double z = beta.back();  // intercept
    for (std::size_t c = 0; c < features.size(); ++c) {
        const double x = (features[c] - mean[c]) / sd[c];
        z += beta[c] * x;
    }
    return sigmoid(z);
}

LogisticParams fit_logistic(const std::vector<LabeledExample>& examples,
                            const LogisticOptions& opts) {
    if (examples.empty()) throw SingleClassData("no training examples");
    const std::size_t n = examples.size();
    const std::size_t width = examples[0].features.size();
    int n_pos = 0;
    for (const auto& ex : examples) {
        if (ex.features.size() != width) throw ValidationError("ragged baseline features");
        n_pos += ex.label;
    }
    if (n_pos == 0 || n_pos == static_cast<int>(n)) {
        throw SingleClassData("logistic fit needs both classes");
    }

    LogisticParams out;
    out.mean.assign(width, 0.0);
    out.sd.assign(width, 0.0);
    for (const auto& ex : examples) {
        for (std::size_t c = 0; c < width; ++c) out.mean[c] += ex.features[c];
    }
    for (double& m : out.mean) m /= static_cast<double>(n);
    for (const auto& ex : examples) {
        for (std::size_t c = 0; c < width; ++c) {
            const double d = ex.features[c] - out.mean[c];
            out.sd[c] += d * d;
        }
    }
    for (double& s : out.sd) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s == 0.0) s = 1.0;
    }

    std::vector<std::vector<double>> x(n, std::vector<double>(width));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < width; ++c) {
            x[i][c] = (examples[i].features[c] - out.mean[c]) / out.sd[c];
        }
    }

    nn::ParamStore store;
    store.add("beta", {width + 1});
    nn::Adam adam({.lr = opts.lr});
    for (int it = 0; it < opts.iterations; ++it) {
        const auto& beta = store.param("beta").data;
        auto& g = store.grad("beta").data;
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double z = beta[width];
            for (std::size_t c = 0; c < width; ++c) z += beta[c] * x[i][c];
            const double err = sigmoid(z) - examples[i].label;
            for (std::size_t c = 0; c < width; ++c) g[c] += err * x[i][c];
            g[width] += err;
        }
        for (std::size_t c = 0; c <= width; ++c) g[c] /= static_cast<double>(n);
        for (std::size_t c = 0; c < width; ++c) g[c] += opts.l2 * beta[c];
        adam.step(store);
    }
    out.beta = store.param("beta").data;
    return out;
}

int discretize_prediction(double t_hat, double t_c) {
    if (t_hat < t_c) throw ValidationError("predicted time before the cut");
    return t_hat <= t_c + 1.0 ? 1 : 0;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw ValidationError("auc: scores and labels must align");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over ties, then the Mann-Whitney statistic.
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k] == 1) {
            rank_sum_pos += rank[k];
            ++n_pos;
        }
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw SingleClassData("auc needs both classes");
    const double u = rank_sum_pos - static_cast<double>(n_pos) *
                                        (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace tdin::eval
