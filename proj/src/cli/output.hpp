#pragma once

// Tabular command output in CSV or JSON.  Every record carries the
// tolerances it was computed under; JSON parses back to the same record.

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stm/errors.hpp"

namespace stm::cli {

struct Tolerance {
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    std::size_t max_subdivisions = 0;
    bool operator==(const Tolerance&) const = default;
};

struct OutputRecord {
    std::string command;
    std::string version;
    std::vector<std::pair<std::string, std::string>> inputs;  // echo, in order
    Tolerance tolerance;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<bool> converged;  // one per row

    void add_row(std::vector<double> r, bool ok = true) {
        if (r.size() != columns.size()) throw std::logic_error("output: row width does not match the columns");
        rows.push_back(std::move(r));
        converged.push_back(ok);
    }
    bool operator==(const OutputRecord&) const = default;
};

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string tolerance_line(const Tolerance& t) {
    return "rel_tol:" + format_number(t.rel_tol) + ",abs_tol:" + format_number(t.abs_tol) +
           ",max_subdivisions:" + std::to_string(t.max_subdivisions);
}

inline void write_csv(std::ostream& os, const OutputRecord& r) {
    os << "# command=" << r.command << " version=" << r.version << '\n';
    for (const auto& [k, v] : r.inputs) os << "# input " << k << '=' << v << '\n';
    os << "# tolerance=" << tolerance_line(r.tolerance) << '\n';
    for (std::size_t j = 0; j < r.columns.size(); ++j) os << r.columns[j] << ',';
    os << "converged\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        for (double v : r.rows[i]) os << format_number(v) << ',';
        os << (r.converged[i] ? 1 : 0) << '\n';
    }
}

// JSON has no infinities or NaN; those travel as strings.
inline nlohmann::ordered_json number_to_json(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

inline double number_from_json(const nlohmann::ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DomainError("output: not a number: " + s);
}

inline nlohmann::ordered_json to_json(const OutputRecord& r) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    j["version"] = r.version;
    j["input"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.inputs) j["input"][k] = v;
    j["tolerance"] = {{"rel_tol", r.tolerance.rel_tol},
                      {"abs_tol", r.tolerance.abs_tol},
                      {"max_subdivisions", r.tolerance.max_subdivisions}};
    j["columns"] = r.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        nlohmann::ordered_json row;
        for (std::size_t c = 0; c < r.columns.size(); ++c) row[r.columns[c]] = number_to_json(r.rows[i][c]);
        row["converged"] = static_cast<bool>(r.converged[i]);
        j["rows"].push_back(row);
    }
    return j;
}

inline OutputRecord from_json(const nlohmann::ordered_json& j) {
    OutputRecord r;
    r.command = j.at("command").get<std::string>();
    r.version = j.at("version").get<std::string>();
    for (const auto& [k, v] : j.at("input").items()) r.inputs.emplace_back(k, v.get<std::string>());
    const auto& t = j.at("tolerance");
    r.tolerance = {t.at("rel_tol").get<double>(), t.at("abs_tol").get<double>(),
                   t.at("max_subdivisions").get<std::size_t>()};
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
        std::vector<double> v;
        for (const auto& c : r.columns) v.push_back(number_from_json(row.at(c)));
        r.rows.push_back(std::move(v));
        r.converged.push_back(row.at("converged").get<bool>());
    }
    return r;
}

inline void write_json(std::ostream& os, const OutputRecord& r) { os << to_json(r).dump(2) << '\n'; }

inline void write(std::ostream& os, const OutputRecord& r, const std::string& format) {
    if (format == "json")
        write_json(os, r);
    else
        write_csv(os, r);
}

}  // namespace stm::cli
