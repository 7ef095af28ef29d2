#pragma once

#include <vector>

#include "tdin/data/records.hpp"

namespace tdin::eval {

// One acquirer-year observation for the acquisition-likelihood baseline:
// accounting features of the year, the mean similarity of the firm's top ten
// peers, and three lagged counts of M&A activity in its one-hop neighborhood.
// The label marks whether the acquirer triggers at least one deal in the
// following year.
struct LabeledExample {
    graph::FirmId acquirer;
    int year = 0;
    std::vector<double> features;
    int label = 0;
};

// Builds one example per frequent acquirer for the given feature year.
// Requires year+1 inside the window and three years of history before year.
std::vector<LabeledExample> build_baseline_features(const data::Dataset& ds, int year);

struct LogisticParams {
    std::vector<double> beta;  // intercept last
    std::vector<double> mean;  // standardization, stored with the fit
    std::vector<double> sd;

    double predict(const std::vector<double>& features) const;
};

struct LogisticOptions {
    int iterations = 600;
    double lr = 0.1;
    double l2 = 1e-4;  // intercept excluded
};

// Bernoulli MLE by gradient descent on standardized features.
LogisticParams fit_logistic(const std::vector<LabeledExample>& examples,
                            const LogisticOptions& opts = {});

// Yearly discretization of a continuous time prediction: 1 when the
// predicted time falls within one year of t_c (closed boundary).
int discretize_prediction(double t_hat, double t_c);

// Mann-Whitney AUC; ties count one half. Throws SingleClassData unless both
// classes appear.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace tdin::eval
