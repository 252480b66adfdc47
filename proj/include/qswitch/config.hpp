#pragma once

#include "qswitch/model.hpp"
#include "qswitch/planner.hpp"
#include "qswitch/simulator.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qswitch {

enum class PolicyMode { Distill, NoDistill };

const char* to_string(PolicyMode mode);  // "distill" / "no_distill"

// Full run configuration. Defaults reproduce the reference setup: lambda1 =
// lambda2 = 0.7, m_star = 3, f_star = 0.85, capacity 3, gamma = 0.9, 10000
// steps, thresholds swept from 0.70 to 0.95 in steps of 0.05.
struct RunConfig {
    ModelParams model;
    PlannerConfig planner;
    SimConfig sim;
    std::vector<double> sweep = {0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
    std::vector<PolicyMode> policy_modes = {PolicyMode::Distill, PolicyMode::NoDistill};
    std::string out_path;
    std::string trace_path;

    void validate() const;
};

// Key = value document, '#' comments. Recognized keys: lambda1, lambda2,
// m_star, f_star, capacity, f_th, distill, gamma, eval_tolerance,
// max_eval_sweeps, max_improvement_rounds, seed, steps, mode, sweep,
// policy_modes, out, trace. Unknown keys are rejected with the key named.
void apply_config_text(RunConfig& config, std::istream& in, const std::string& source);

// Defaults overlaid with the file's settings; the result is validated.
RunConfig parse_config_file(const std::string& path);

// Command-line values; every present field overrides the file/defaults.
struct ConfigOverrides {
    std::optional<double> f_th;
    std::optional<bool> no_distill;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<SimMode> mode;
    std::optional<std::string> out_path;
    std::optional<std::string> trace_path;
};

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

}  // namespace qswitch
