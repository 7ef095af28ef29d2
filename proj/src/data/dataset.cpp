#include "tdin/data/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tdin/data/preprocess.hpp"
#include "tdin/io/csv.hpp"
#include "tdin/io/dates.hpp"

namespace tdin::data {

namespace fs = std::filesystem;

std::vector<DealRecord> load_deals_csv(const std::string& path, int year0) {
    const auto rows = io::read_csv(path);
    if (rows.empty()) throw ValidationError("empty deals file: " + path);
    std::vector<DealRecord> deals;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 7) throw ValidationError("bad deals row in " + path);
        DealRecord d;
        d.acquirer = r[0];
        d.target = r[1];
        d.t = io::date_to_years(io::parse_date(r[2]), year0);
        d.pct_acquired = io::parse_double(r[3], path);
        d.pct_after = io::parse_double(r[4], path);
        d.value_musd = io::parse_double(r[5], path);
        d.deal_type = r[6];
        deals.push_back(std::move(d));
    }
    std::sort(deals.begin(), deals.end(), [](const DealRecord& a, const DealRecord& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.acquirer != b.acquirer) return a.acquirer < b.acquirer;
        return a.target < b.target;
    });
    return deals;
}

void save_deals_csv(const std::vector<DealRecord>& deals, const std::string& path,
                    int year0) {
    io::CsvWriter w(path);
    w.row({"acquirer", "target", "date", "pct_acquired", "pct_after", "value_musd",
           "deal_type"});
    for (const auto& d : deals) {
        w.row({d.acquirer, d.target, io::format_date(io::years_to_date(d.t, year0)),
               io::format_double(d.pct_acquired), io::format_double(d.pct_after),
               io::format_double(d.value_musd), d.deal_type});
    }
    w.flush_or_throw(path);
}

FeatureTable load_features_csv(const std::string& path) {
    const auto rows = io::read_csv(path);
    if (rows.empty()) throw ValidationError("empty features file: " + path);
    const auto& header = rows[0];
    if (header.size() != 2 + kAccountingCount || header[0] != "firm" || header[1] != "year") {
        throw ValidationError("bad features header in " + path);
    }
    for (std::size_t c = 0; c < kAccountingCount; ++c) {
        if (header[2 + c] != kAccountingColumns[c]) {
            throw ValidationError("unexpected feature column '" + header[2 + c] + "' in " +
                                  path);
        }
    }
    FeatureTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size()) throw ValidationError("ragged features row in " + path);
        FirmFeatures f;
        f.firm = r[0];
        f.period = io::parse_int(r[1], path);
        f.accounting.reserve(kAccountingCount);
        for (std::size_t c = 0; c < kAccountingCount; ++c) {
            const auto& cell = r[2 + c];
            f.accounting.push_back(cell.empty()
                                       ? std::numeric_limits<double>::quiet_NaN()
                                       : io::parse_double(cell, path));
        }
        table.put(std::move(f));
    }
    return table;
}

void save_features_csv(const FeatureTable& table, const std::string& path) {
    io::CsvWriter w(path);
    std::vector<std::string> header = {"firm", "year"};
    for (const char* c : kAccountingColumns) header.emplace_back(c);
    w.row(header);
    for (const auto& [firm, by_period] : table.rows()) {
        for (const auto& [period, row] : by_period) {
            std::vector<std::string> out = {firm, std::to_string(period)};
            for (double v : row.accounting) {
                out.push_back(std::isnan(v) ? "" : io::format_double(v));
            }
            w.row(out);
        }
    }
    w.flush_or_throw(path);
}

void load_embeddings_jsonl(const std::string& path, FeatureTable& table) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::string line;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const auto firm = j.at("firm").get<std::string>();
        const int year = j.at("year").get<int>();
        auto vec = j.at("vector").get<std::vector<double>>();
        if (dim == 0) dim = vec.size();
        if (vec.size() != dim || dim == 0) {
            throw ValidationError("inconsistent embedding dimension in " + path);
        }
        auto fit = table.rows().find(firm);
        if (fit == table.rows().end()) continue;  // embedding for an unlisted firm
        auto pit = fit->second.find(year);
        if (pit == fit->second.end()) continue;
        pit->second.text_embedding = std::move(vec);
    }
    for (const auto& [firm, by_period] : table.rows()) {
        for (const auto& [period, row] : by_period) {
            if (row.text_embedding.empty()) {
                throw ValidationError("missing text embedding for " + firm + "/" +
                                      std::to_string(period));
            }
        }
    }
}

void save_embeddings_jsonl(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    for (const auto& [firm, by_period] : table.rows()) {
        for (const auto& [period, row] : by_period) {
            nlohmann::json j;
            j["firm"] = firm;
            j["year"] = period;
            j["vector"] = row.text_embedding;
            out << j.dump() << '\n';
        }
    }
    if (!out) throw IoFailure("write failed for " + path);
}

std::vector<graph::SimilarityRecord> load_similarity_csv(const std::string& path) {
    const auto rows = io::read_csv(path);
    if (rows.empty()) throw ValidationError("empty similarity file: " + path);
    std::vector<graph::SimilarityRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 4) throw ValidationError("bad similarity row in " + path);
        records.push_back({r[0], r[1], io::parse_int(r[2], path),
                           io::parse_double(r[3], path)});
    }
    return records;
}

void save_similarity_csv(const std::vector<graph::SimilarityRecord>& records,
                         const std::string& path) {
    io::CsvWriter w(path);
    w.row({"firm_a", "firm_b", "year", "score"});
    for (const auto& r : records) {
        w.row({r.firm_a, r.firm_b, std::to_string(r.period), io::format_double(r.score)});
    }
    w.flush_or_throw(path);
}

graph::DynamicGraph build_graph(const std::vector<graph::SimilarityRecord>& records,
                                int k_top, double threshold) {
    std::set<int> periods;
    for (const auto& r : records) periods.insert(r.period);
    graph::DynamicGraph g;
    for (int p : periods) {
        g.snapshots.emplace(p, graph::build_snapshot(records, p, k_top, threshold));
    }
    g.validate();
    return g;
}

Dataset preprocess(const std::string& deals_csv, const std::string& features_csv,
                   const std::string& embeddings_jsonl, const std::string& similarity_csv,
                   const PreprocessOptions& opts) {
    Dataset ds;
    ds.k_top = opts.k_top;
    ds.threshold = opts.threshold;

    FeatureTable raw_features = load_features_csv(features_csv);
    if (raw_features.empty()) throw ValidationError("feature table is empty");
    int min_year = std::numeric_limits<int>::max();
    int max_year = std::numeric_limits<int>::min();
    for (const auto& [firm, by_period] : raw_features.rows()) {
        for (const auto& [period, row] : by_period) {
            min_year = std::min(min_year, period);
            max_year = std::max(max_year, period);
        }
    }
    ds.year0 = min_year;
    ds.n_years = max_year - min_year + 1;

    load_embeddings_jsonl(embeddings_jsonl, raw_features);
    ds.features = interpolate_missing(raw_features);
    ds.deals = filter_deals(load_deals_csv(deals_csv, ds.year0));
    ds.frequent = frequent_acquirers(ds.deals, opts.min_deals);
    ds.graph = build_graph(load_similarity_csv(similarity_csv), opts.k_top, opts.threshold);
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
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

    nlohmann::json meta;
    meta["year0"] = ds.year0;
    meta["n_years"] = ds.n_years;
    meta["k_top"] = ds.k_top;
    meta["threshold"] = ds.threshold;
    meta["frequent"] = std::vector<std::string>(ds.frequent.begin(), ds.frequent.end());
    std::ofstream out(dir + "/meta.json");
    if (!out) throw IoFailure("cannot write " + dir + "/meta.json");
    out << meta.dump(2) << '\n';
    if (!out) throw IoFailure("write failed for " + dir + "/meta.json");
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream in(dir + "/meta.json");
    if (!in) throw IoFailure("cannot open " + dir + "/meta.json");
    nlohmann::json meta;
    in >> meta;

    Dataset ds;
    ds.year0 = meta.at("year0").get<int>();
    ds.n_years = meta.at("n_years").get<int>();
    ds.k_top = meta.at("k_top").get<int>();
    ds.threshold = meta.at("threshold").get<double>();
    for (const auto& f : meta.at("frequent")) ds.frequent.insert(f.get<std::string>());

    ds.features = load_features_csv(dir + "/features.csv");
    load_embeddings_jsonl(dir + "/embeddings.jsonl", ds.features);
    ds.deals = load_deals_csv(dir + "/deals.csv", ds.year0);
    ds.graph = build_graph(load_similarity_csv(dir + "/similarity.csv"), ds.k_top,
                           ds.threshold);
    return ds;
}

}  // namespace tdin::data
