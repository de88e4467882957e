#ifndef LIFTLAB_REPORT_HPP
#define LIFTLAB_REPORT_HPP

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "liftlab/common.hpp"
#include "liftlab/config.hpp"

namespace liftlab {

using json = nlohmann::json;

// Every numeric result carries a provenance tag so downstream consumers can
// tell a closed-form value from a truncated or sampled one.
inline const std::vector<std::string>& provenance_tags() {
    static const std::vector<std::string> v{"exact", "galerkin", "monte-carlo", "estimated"};
    return v;
}

inline json tagged(double value, const std::string& provenance) {
    bool known = false;
    for (const auto& t : provenance_tags()) known = known || t == provenance;
    require(known, "unknown provenance tag: " + provenance);
    return json{{"value", value}, {"provenance", provenance}};
}

inline json tagged(double value, const std::string& provenance, const std::string& exact_form) {
    json j = tagged(value, provenance);
    j["exact"] = exact_form;
    return j;
}

inline json tagged_with_se(double value, double standard_error) {
    json j = tagged(value, "monte-carlo");
    j["standard_error"] = standard_error;
    return j;
}

// Top-level run report. Keys are emitted sorted, so identical inputs yield
// byte-identical files; wall-clock timings are opt-in for that reason.
inline json make_report(const std::string& subcommand, std::uint64_t seed, const json& config_echo,
                        const json& results) {
    json j;
    j["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["config"] = config_echo;
    j["results"] = results;
    return j;
}

inline json echo_config(const ExperimentConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.entries) j[k] = v;
    return j;
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    require(out.good(), "cannot open output file " + path);
    out << j.dump(2) << "\n";
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows, int precision = 17) {
    std::ofstream out(path);
    require(out.good(), "cannot open output file " + path);
    out << header << "\n";
    out.precision(precision);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace liftlab

#endif
