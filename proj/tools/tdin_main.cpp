// Command-line surface for the M&A event-prediction pipeline:
// simulate -> preprocess -> train -> predict / evaluate / export-graph.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdin/config.hpp"
#include "tdin/data/dataset.hpp"
#include "tdin/data/synth.hpp"
#include "tdin/errors.hpp"
#include "tdin/eval/head_to_head.hpp"
#include "tdin/graph/graph.hpp"
#include "tdin/io/csv.hpp"
#include "tdin/log.hpp"
#include "tdin/model/model.hpp"
#include "tdin/model/timeline.hpp"
#include "tdin/model/train.hpp"

namespace fs = std::filesystem;

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Deal-level M&A prediction: temporal point process on a dynamic "
                 "industry network"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic world");
    sim->add_option("--config", config_path, "Key-value config file");
    sim->add_option("--seed", seed, "World seed");
    sim->add_option("--out", out_dir, "Output directory")->required();

    // --- preprocess ---
    auto* pre = app.add_subcommand("preprocess", "Raw files to a training dataset");
    std::string in_dir;
    int k_top = 10;
    double threshold = 0.2;
    int min_deals = 4;
    pre->add_option("--in", in_dir, "Directory with deals.csv, features.csv, "
                                    "embeddings.jsonl, similarity.csv")
        ->required();
    pre->add_option("--k", k_top, "Top-k peers per firm");
    pre->add_option("--threshold", threshold, "Absolute similarity threshold");
    pre->add_option("--min-deals", min_deals, "Frequent-acquirer deal count");
    pre->add_option("--out", out_dir, "Output dataset directory")->required();

    // --- train ---
    auto* trn = app.add_subcommand("train", "Fit the model on a dataset");
    std::string data_dir;
    int split_year = 0;
    trn->add_option("--data", data_dir, "Dataset directory")->required();
    trn->add_option("--config", config_path, "Key-value config file");
    trn->add_option("--seed", seed, "Training seed");
    trn->add_option("--split-year", split_year,
                    "Use data up to the end of this calendar year only");
    trn->add_option("--out", out_dir, "Output directory")->required();

    // --- predict ---
    auto* prd = app.add_subcommand("predict", "Next deal time and target ranking");
    std::string checkpoint_path, acquirer;
    double t_c = 0.0, horizon = -1.0;
    prd->add_option("--checkpoint", checkpoint_path, "Model checkpoint")->required();
    prd->add_option("--data", data_dir, "Dataset directory")->required();
    prd->add_option("--acquirer", acquirer, "Acquirer firm id")->required();
    prd->add_option("--t-c", t_c, "Prediction cut in years since window start")
        ->required();
    prd->add_option("--horizon", horizon,
                    "Expectation horizon in years since window start "
                    "(default: cut + 30)");
    prd->add_option("--out", out_dir, "Output directory")->required();

    // --- evaluate ---
    auto* evl = app.add_subcommand("evaluate", "Head-to-head with the logistic baseline");
    evl->add_option("--checkpoint", checkpoint_path, "Model checkpoint")->required();
    evl->add_option("--data", data_dir, "Dataset directory")->required();
    evl->add_option("--split-year", split_year, "Last training calendar year")->required();
    evl->add_option("--out", out_dir, "Output directory")->required();

    // --- export-graph ---
    auto* exg = app.add_subcommand("export-graph", "Adjacency matrix of one period");
    int year = 0;
    std::string out_file;
    exg->add_option("--data", data_dir, "Dataset directory")->required();
    exg->add_option("--year", year, "Calendar year")->required();
    exg->add_option("--out", out_file, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        tdin::KvConfig kv = config_path.empty() ? tdin::KvConfig{}
                                                : tdin::KvConfig::parse_file(config_path);
        const auto world_cfg = tdin::world_config_from(kv);
        const auto world = tdin::data::synth_generate(world_cfg, seed);
        tdin::data::save_world(world, world_cfg, out_dir);
        tdin::log::info("wrote synthetic world with " +
                        std::to_string(world.dataset.deals.size()) + " deals to " + out_dir);
        return 0;
    }

    if (pre->parsed()) {
        tdin::data::PreprocessOptions opts;
        opts.k_top = k_top;
        opts.threshold = threshold;
        opts.min_deals = min_deals;
        const auto ds = tdin::data::preprocess(
            in_dir + "/deals.csv", in_dir + "/features.csv", in_dir + "/embeddings.jsonl",
            in_dir + "/similarity.csv", opts);
        tdin::data::save_dataset(ds, out_dir);
        tdin::log::info("dataset: " + std::to_string(ds.deals.size()) + " deals, " +
                        std::to_string(ds.frequent.size()) + " frequent acquirers");
        return 0;
    }

    if (trn->parsed()) {
        const auto ds = tdin::data::load_dataset(data_dir);
        tdin::KvConfig kv = config_path.empty() ? tdin::KvConfig{}
                                                : tdin::KvConfig::parse_file(config_path);
        auto cfg = tdin::model_config_from(kv);
        if (split_year > 0) {
            cfg.train_t_end = static_cast<double>(split_year - ds.year0) + 1.0;
        }
        const auto result = tdin::model::train(ds, cfg, seed);

        fs::create_directories(out_dir);
        tdin::model::save_checkpoint(out_dir + "/checkpoint.json", cfg, result.params);
        tdin::io::CsvWriter w(out_dir + "/loss_curve.csv");
        w.row({"epoch", "timing_nll", "choice_loss", "total"});
        for (std::size_t e = 0; e < result.history.size(); ++e) {
            const auto& l = result.history[e];
            w.row({std::to_string(e), tdin::io::format_double(l.timing_nll),
                   tdin::io::format_double(l.choice_loss),
                   tdin::io::format_double(l.total())});
        }
        w.flush_or_throw(out_dir + "/loss_curve.csv");
        tdin::log::info("final loss " +
                        std::to_string(result.history.back().total()));
        return 0;
    }

    if (prd->parsed()) {
        const auto ds = tdin::data::load_dataset(data_dir);
        auto [cfg, params] = tdin::model::load_checkpoint(checkpoint_path);
        const auto timelines = tdin::model::build_timelines(ds);
        if (timelines.find(acquirer) == timelines.end()) {
            throw tdin::UnknownFirm("acquirer " + acquirer +
                                    " is not a frequent acquirer in this dataset");
        }
        if (horizon <= t_c) horizon = t_c + 30.0;
        const auto pred =
            tdin::model::predict_next(params, ds, timelines, acquirer, t_c, horizon);

        fs::create_directories(out_dir);
        const std::string path = out_dir + "/prediction.jsonl";
        std::ofstream out(path);
        if (!out) throw tdin::IoFailure("cannot write " + path);
        nlohmann::json j;
        j["acquirer"] = acquirer;
        j["t_hat"] = pred.t_hat;
        nlohmann::json targets = nlohmann::json::array();
        for (const auto& [firm, p] : pred.targets) {
            targets.push_back({{"firm", firm}, {"p", p}});
        }
        j["targets"] = targets;
        out << j.dump() << '\n';
        if (!out) throw tdin::IoFailure("write failed for " + path);
        tdin::log::info("t_hat = " + std::to_string(pred.t_hat));
        return 0;
    }

    if (evl->parsed()) {
        const auto ds = tdin::data::load_dataset(data_dir);
        auto [cfg, params] = tdin::model::load_checkpoint(checkpoint_path);
        const auto report = tdin::eval::evaluate_head_to_head(ds, params, split_year);
        fs::create_directories(out_dir);
        tdin::eval::save_report(report, out_dir + "/report.json", out_dir + "/scores.csv");
        tdin::log::info("baseline_auc=" + std::to_string(report.baseline_auc) +
                        " tdin_auc=" + std::to_string(report.tdin_auc));
        return 0;
    }

    if (exg->parsed()) {
        const auto ds = tdin::data::load_dataset(data_dir);
        auto it = ds.graph.snapshots.find(year);
        if (it == ds.graph.snapshots.end()) {
            throw tdin::OutOfWindow("no graph snapshot for year " + std::to_string(year));
        }
        tdin::graph::export_adjacency(it->second, out_file);
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tdin::ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << "\n";
        return 2;
    } catch (const tdin::Error& e) {
        std::cerr << "error (runtime): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
