#pragma once

// Run configuration: defaults, then a key=value file, then explicit flags.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "stm/errors.hpp"
#include "stm/quad.hpp"

namespace stm::cli {

struct RunConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    std::size_t max_subdivisions = 2000;
    std::uint64_t mc_seed = 20240607;
    std::uint64_t mc_samples = 10'000'000;
    unsigned threads = 1;
    std::string format = "csv";
    std::string cache;

    quad::QuadSpec spec() const {
        quad::QuadSpec s;
        s.rel_tol = rel_tol;
        s.abs_tol = abs_tol;
        s.max_subdivisions = max_subdivisions;
        s.validate();
        return s;
    }

    void validate() const {
        spec();
        if (format != "csv" && format != "json") throw DomainError("config: format must be csv or json");
        if (threads < 1) throw DomainError("config: threads must be >= 1");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, const std::string& key) {
    T v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw DomainError("config: bad value for " + key + ": '" + std::string(text) + "'");
    return v;
}

}  // namespace detail

// One `key = value` per line; '#' starts a comment.  Unknown keys are errors.
inline void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    const std::string k(key);
    if (k == "rel_tol") c.rel_tol = detail::parse_number<double>(value, k);
    else if (k == "abs_tol") c.abs_tol = detail::parse_number<double>(value, k);
    else if (k == "max_subdivisions") c.max_subdivisions = detail::parse_number<std::size_t>(value, k);
    else if (k == "mc_seed" || k == "seed") c.mc_seed = detail::parse_number<std::uint64_t>(value, k);
    else if (k == "mc_samples") c.mc_samples = detail::parse_number<std::uint64_t>(value, k);
    else if (k == "threads") c.threads = detail::parse_number<unsigned>(value, k);
    else if (k == "format") c.format = std::string(value);
    else if (k == "cache") c.cache = std::string(value);
    else throw DomainError("config: unknown key '" + k + "'");
}

inline void load_config(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v(line);
        if (auto h = v.find('#'); h != std::string_view::npos) v = v.substr(0, h);
        v = detail::trim(v);
        if (v.empty()) continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw DomainError("config: " + path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_setting(c, detail::trim(v.substr(0, eq)), detail::trim(v.substr(eq + 1)));
    }
}

}  // namespace stm::cli
