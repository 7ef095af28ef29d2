#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tdin/errors.hpp"

namespace tdin::io {

// Formats a double with enough digits to round-trip exactly. Deterministic
// across runs, which the pipeline's byte-identical output contract relies on.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Reads all rows of a CSV file. First row is returned as-is (callers treat it
// as the header). Empty trailing lines are skipped. CRLF tolerated.
inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw IoFailure("cannot open " + path + " for writing");
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void flush_or_throw(const std::string& path) {
        out_.flush();
        if (!out_) throw IoFailure("write failed for " + path);
    }

  private:
    std::ofstream out_;
};

inline double parse_double(const std::string& s, const std::string& context) {
    if (s.empty()) throw ValidationError("empty numeric field in " + context);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError("bad numeric field '" + s + "' in " + context);
    }
    if (pos != s.size()) throw ValidationError("bad numeric field '" + s + "' in " + context);
    return v;
}

inline int parse_int(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError("bad integer field '" + s + "' in " + context);
    }
    if (pos != s.size()) throw ValidationError("bad integer field '" + s + "' in " + context);
    return v;
}

}  // namespace tdin::io
