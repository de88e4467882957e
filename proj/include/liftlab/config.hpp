#ifndef LIFTLAB_CONFIG_HPP
#define LIFTLAB_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/common.hpp"

namespace liftlab {

// Flat key-value experiment configuration: one `key = value` per line, `#`
// comments. Insertion order is preserved for faithful echo into reports.
struct ExperimentConfig {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const {
        return std::any_of(entries.begin(), entries.end(), [&](const auto& kv) { return kv.first == key; });
    }
    std::string get(const std::string& key, const std::string& fallback = "") const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        return fallback;
    }
    double get_double(const std::string& key, double fallback) const {
        std::string v = get(key);
        return v.empty() ? fallback : std::stod(v);
    }
    long get_long(const std::string& key, long fallback) const {
        std::string v = get(key);
        return v.empty() ? fallback : std::stol(v);
    }
    bool get_bool(const std::string& key, bool fallback) const {
        std::string v = get(key);
        if (v.empty()) return fallback;
        return v == "true" || v == "1" || v == "yes";
    }
    void set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : entries) {
            if (k == key) {
                v = value;
                return;
            }
        }
        entries.emplace_back(key, value);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

}  // namespace detail

inline const std::vector<std::string>& known_subcommands() {
    static const std::vector<std::string> v{"simulate", "liftcheck", "spectral", "circle", "bounds", "reproduce"};
    return v;
}

inline const std::vector<std::string>& known_potentials() {
    static const std::vector<std::string> v{"quadratic", "double_well"};
    return v;
}

// Parses and precondition-checks a config file. All violations are collected
// and reported together, not just the first.
inline ExperimentConfig validate_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "validate_config: cannot open " + path);
    ExperimentConfig cfg;
    std::vector<std::string> violations;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            violations.push_back("line " + std::to_string(lineno) + ": expected `key = value`, got `" + t + "`");
            continue;
        }
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty()) {
            violations.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        cfg.set(key, value);
    }

    cfg.subcommand = cfg.get("subcommand");
    if (cfg.subcommand.empty()) {
        violations.push_back("missing key `subcommand`");
    } else if (std::find(known_subcommands().begin(), known_subcommands().end(), cfg.subcommand) ==
               known_subcommands().end()) {
        std::string names;
        for (const auto& s : known_subcommands()) names += (names.empty() ? "" : ", ") + s;
        violations.push_back("unknown subcommand `" + cfg.subcommand + "` (known: " + names + ")");
    }

    if (cfg.has("potential")) {
        std::string p = cfg.get("potential");
        if (std::find(known_potentials().begin(), known_potentials().end(), p) == known_potentials().end()) {
            std::string names;
            for (const auto& s : known_potentials()) names += (names.empty() ? "" : ", ") + s;
            violations.push_back("unknown potential `" + p + "` (known: " + names + ")");
        }
        double m;
        if (p == "quadratic" && cfg.has("m") && (!detail::parse_double(cfg.get("m"), m) || m <= 0))
            violations.push_back("`m` must be a positive real (Poincare constant of the target)");
        double beta;
        if (p == "double_well" && cfg.has("beta") && (!detail::parse_double(cfg.get("beta"), beta) || beta <= 0))
            violations.push_back("`beta` must be a positive real");
    }
    if (cfg.has("gamma") && cfg.get("gamma") != "auto") {
        double g;
        if (!detail::parse_double(cfg.get("gamma"), g)) {
            violations.push_back("`gamma` must be a real number or `auto`");
        } else if (g < 0) {
            violations.push_back("`gamma` must be nonnegative (refresh/friction rate)");
        } else if (g == 0 && (cfg.subcommand == "bounds" || cfg.subcommand == "liftcheck")) {
            violations.push_back("`gamma` must be positive: the contraction-rate pipeline requires gamma > 0");
        }
    }
    for (const char* key : {"samples", "chains", "degree", "seed"}) {
        if (cfg.has(key)) {
            try {
                long v = std::stol(cfg.get(key));
                if (v < 0) violations.push_back(std::string("`") + key + "` must be nonnegative");
            } catch (...) {
                violations.push_back(std::string("`") + key + "` must be an integer");
            }
        }
    }
    for (const char* key : {"horizon", "step", "eps", "T", "m", "beta", "kappa_minus", "tol"}) {
        if (cfg.has(key)) {
            double v;
            if (!detail::parse_double(cfg.get(key), v))
                violations.push_back(std::string("`") + key + "` must be a real number");
        }
    }
    double eps;
    if (cfg.has("eps") && detail::parse_double(cfg.get("eps"), eps) && (eps <= 0 || eps > 1))
        violations.push_back("`eps` must lie in (0, 1]");
    double step;
    if (cfg.has("step") && detail::parse_double(cfg.get("step"), step) && step <= 0)
        violations.push_back("`step` must be positive");
    double horizon;
    if (cfg.has("horizon") && detail::parse_double(cfg.get("horizon"), horizon) && horizon < 0)
        violations.push_back("`horizon` must be nonnegative");

    if (!violations.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ConfigError(msg);
    }
    return cfg;
}

// start:stop:step grids like `0:5:0.01`.
inline bool parse_grid_spec(const std::string& spec, double& start, double& stop, double& step) {
    std::istringstream ss(spec);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) return false;
    return detail::parse_double(a, start) && detail::parse_double(b, stop) && detail::parse_double(c, step);
}

inline std::vector<double> parse_double_list(const std::string& spec) {
    std::vector<double> out;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double v;
        require(detail::parse_double(detail::trim(tok), v), "expected a comma-separated list of reals: " + spec);
        out.push_back(v);
    }
    return out;
}

inline std::vector<long> parse_long_list(const std::string& spec) {
    std::vector<long> out;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stol(detail::trim(tok)));
        } catch (...) {
            throw ConfigError("expected a comma-separated list of integers: " + spec);
        }
    }
    return out;
}

}  // namespace liftlab

#endif
