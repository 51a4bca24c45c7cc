#pragma once

// CSV tables with '#' comment headers, plain numeric matrix reader, and
// atomic file output.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hcdep/errors.hpp"

namespace hcdep::cli {

#ifndef HCDEP_VERSION
#define HCDEP_VERSION "0.0.0"
#endif

inline constexpr const char* kVersion = HCDEP_VERSION;

/// Shortest round-trip decimal form; inf and nan spelled out.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::uint64_t x) { return std::to_string(x); }

using Cell = std::variant<double, std::uint64_t, std::string>;

inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* u = std::get_if<std::uint64_t>(&c)) return format_number(*u);
    return quote_field(std::get<std::string>(c));
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Summary block, written as `# summary: key=value` after the config line.
    std::vector<std::pair<std::string, std::string>> summary;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw NumericalError("Table::add_row: width mismatch");
        rows.push_back(std::move(row));
    }
    void add_summary(std::string key, double value) { summary.emplace_back(std::move(key), format_number(value)); }
    void add_summary(std::string key, std::string value) { summary.emplace_back(std::move(key), std::move(value)); }
};

inline void write_summary(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.summary) os << "# summary: " << k << '=' << v << "\r\n";
}

/// Comment headers (version, command, config) then the RFC-4180 body.
inline void write_csv(std::ostream& os, const Table& t, const std::string& command, const std::string& config_json,
                      bool with_summary = true) {
    os << "# hcdep " << kVersion << "\r\n";
    os << "# command: " << command << "\r\n";
    os << "# config: " << config_json << "\r\n";
    if (with_summary) write_summary(os, t);
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << quote_field(t.columns[i]);
    os << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << "\r\n";
    }
}

/// Writes through `path.tmp` and renames, so a failed run leaves no file.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path path) : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_) throw ConfigError("output", "cannot open '" + tmp_.string() + "' for writing");
    }
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;
    ~AtomicFile() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return out_; }

    void commit() {
        out_.close();
        if (!out_) throw NumericalError("write failed for '" + tmp_.string() + "'");
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

/// Plain numeric matrix: comma separated, '#' lines and blank lines skipped,
/// a leading non-numeric row is treated as a header.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("output.data", "cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        bool numeric = true;
        for (std::string f; std::getline(ss, f, ',');) {
            const auto b = f.find_first_not_of(" \t");
            const auto e = f.find_last_not_of(" \t");
            f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty()) continue;
            throw ConfigError("output.data", "non-numeric field on line " + std::to_string(lineno));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError("output.data", "ragged row on line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("output.data", "no numeric rows in '" + path + "'");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

}  // namespace hcdep::cli
