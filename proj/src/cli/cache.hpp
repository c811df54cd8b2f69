#pragma once

// On-disk s(m) curve.  Entries are keyed by the exact mass value and are
// only trusted when the file was written under the same tolerances.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cli/output.hpp"
#include "stm/criticality.hpp"

namespace stm::cli {

class SCurveCache {
public:
    SCurveCache(std::string path, Tolerance tol) : path_(std::move(path)), tol_(tol) {
        std::ifstream in(path_);
        if (!in) return;  // no cache yet
        std::string line;
        bool tolerance_seen = false;
        while (std::getline(in, line)) {
            if (line.rfind("# tolerance=", 0) == 0) {
                tolerance_seen = true;
                if (line.substr(12) != tolerance_line(tol_)) {
                    stale_ = true;
                    entries_.clear();
                    return;
                }
                continue;
            }
            if (line.empty() || line[0] == '#' || line.rfind("m,", 0) == 0) continue;
            std::istringstream ss(line);
            std::string a, b, c;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
                throw DomainError("cache: malformed line in " + path_ + ": " + line);
            entries_[parse(a)] = {parse(b), parse(c), 0};
        }
        if (!tolerance_seen) {
            stale_ = true;
            entries_.clear();
        }
    }

    // Files written under other tolerances are left alone.
    bool stale() const { return stale_; }
    std::size_t size() const { return entries_.size(); }

    const RootReport* find(double m) const {
        auto it = entries_.find(m);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void insert(double m, const RootReport& r) {
        if (!stale_) entries_[m] = r;
    }

    void save() const {
        if (stale_) return;
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw DomainError("cache: cannot write " + path_);
        out << "# s(m) curve\n# tolerance=" << tolerance_line(tol_) << "\nm,s,residual\n";
        for (const auto& [m, r] : entries_)
            out << format_number(m) << ',' << format_number(r.value) << ',' << format_number(r.residual) << '\n';
    }

    // s(m) from the cache, or solved (and remembered).
    RootReport s_of_m(MassParam m, const quad::QuadSpec& spec) {
        if (const auto* hit = find(m.m)) return *hit;
        const auto r = stm::s_of_m(m, spec);
        insert(m.m, r);
        return r;
    }

private:
    static double parse(const std::string& t) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size()) throw DomainError("cache: bad number '" + t + "'");
        return v;
    }

    std::string path_;
    Tolerance tol_;
    std::map<double, RootReport> entries_;
    bool stale_ = false;
};

}  // namespace stm::cli
