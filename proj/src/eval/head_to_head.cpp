#include "tdin/eval/head_to_head.hpp"

#include <cmath>
#include <fstream>

#include "tdin/io/csv.hpp"
#include "tdin/model/timeline.hpp"
#include "tdin/pp/likelihood.hpp"

namespace tdin::eval {

nlohmann::json Report::to_json() const {
    return nlohmann::json{{"baseline_auc", baseline_auc},
                          {"tdin_auc", tdin_auc},
                          {"auc_ratio", auc_ratio},
                          {"n_eval", n_eval},
                          {"split_year", split_year}};
}

Report evaluate_head_to_head(const data::Dataset& ds, nn::ParamStore& tdin_params,
                             int split_year) {
    if (split_year + 1 > ds.year0 + ds.n_years - 1) {
        throw ValidationError("split_year leaves no evaluation year");
    }
    if (split_year - 1 < ds.year0 + 3) {
        throw InsufficientHistory("split_year leaves no baseline training years");
    }

    // Baseline: fit on the feature years whose label window closes by the
    // end of the split year.
    std::vector<LabeledExample> train;
    for (int year = ds.year0 + 3; year <= split_year - 1; ++year) {
        auto rows = build_baseline_features(ds, year);
        train.insert(train.end(), rows.begin(), rows.end());
    }
    const LogisticParams logit = fit_logistic(train);

    // Evaluation year: features at the split year, labels from the year
    // after it. The model scores with its history frozen at the split.
    const auto eval_rows = build_baseline_features(ds, split_year);
    const model::Timelines timelines = model::build_timelines(ds);
    const double t_c = static_cast<double>(split_year - ds.year0) + 1.0;

    Report report;
    report.split_year = split_year;
    std::vector<double> tdin_scores, base_scores;
    std::vector<int> labels;
    for (const auto& ex : eval_rows) {
        ScoreRow row;
        row.acquirer = ex.acquirer;
        row.year = split_year;
        row.label = ex.label;
        row.baseline_score = logit.predict(ex.features);

        const auto& timeline = timelines.at(ex.acquirer);
        const auto frozen = model::freeze_intensity(tdin_params, ds, timeline, t_c);
        const double integrated = pp::compensator(frozen, t_c, t_c + 1.0);
        row.tdin_score = 1.0 - std::exp(-integrated);

        tdin_scores.push_back(row.tdin_score);
        base_scores.push_back(row.baseline_score);
        labels.push_back(row.label);
        report.rows.push_back(std::move(row));
    }

    report.n_eval = static_cast<int>(report.rows.size());
    report.tdin_auc = auc(tdin_scores, labels);
    report.baseline_auc = auc(base_scores, labels);
    report.auc_ratio = report.baseline_auc > 0.0 ? report.tdin_auc / report.baseline_auc : 0.0;
    return report;
}

void save_report(const Report& report, const std::string& json_path,
                 const std::string& scores_csv_path) {
    std::ofstream out(json_path);
    if (!out) throw IoFailure("cannot write " + json_path);
    out << report.to_json().dump(2) << '\n';
    if (!out) throw IoFailure("write failed for " + json_path);

    io::CsvWriter w(scores_csv_path);
    w.row({"acquirer", "year", "label", "tdin_score", "baseline_score"});
    for (const auto& row : report.rows) {
        w.row({row.acquirer, std::to_string(row.year), std::to_string(row.label),
               io::format_double(row.tdin_score), io::format_double(row.baseline_score)});
    }
    w.flush_or_throw(scores_csv_path);
}

}  // namespace tdin::eval
