#pragma once

#include <string>
#include <vector>

#include "tdin/eval/baseline.hpp"
#include "tdin/model/model.hpp"

namespace tdin::eval {

struct ScoreRow {
    graph::FirmId acquirer;
    int year = 0;
    int label = 0;
    double tdin_score = 0.0;      // P(next event within a year)
    double baseline_score = 0.0;  // logistic probability
};

struct Report {
    double baseline_auc = 0.0;
    double tdin_auc = 0.0;
    double auc_ratio = 0.0;
    int n_eval = 0;
    int split_year = 0;
    std::vector<ScoreRow> rows;

    nlohmann::json to_json() const;
};

// Scores every frequent acquirer for the year after split_year. The model
// parameters must come from a fit on data up to the end of split_year; the
// logistic baseline is fitted here on the same training span. The model's
// continuous score is the exceedance probability 1 - exp(-integrated
// intensity over the next year) with the history frozen at the split.
Report evaluate_head_to_head(const data::Dataset& ds, nn::ParamStore& tdin_params,
                             int split_year);

void save_report(const Report& report, const std::string& json_path,
                 const std::string& scores_csv_path);

}  // namespace tdin::eval
