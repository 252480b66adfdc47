#pragma once

#include "qswitch/model.hpp"
#include "qswitch/planner.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qswitch {

// Plain-text policy artifact. Header lines carry the parameters the policy
// was solved for plus solver diagnostics; then one line per state in
// canonical order:
//   A=[0,1] B=[2] -> SWAP(0,2)
struct PolicyArtifact {
    ModelParams params;
    double gamma = 0.9;
    double eval_tolerance = 1e-10;
    int iterations = 0;
    double residual = 0.0;
    std::vector<std::pair<SwitchState, Action>> entries;
};

void write_policy(std::ostream& out, const SwitchModel& model, const PolicyVec& policy,
                  const PlannerConfig& planner, int iterations, double residual);

PolicyArtifact parse_policy(std::istream& in);

// Maps artifact entries back onto a model's action indices. Checks that
// every model state appears exactly once and every assigned action is
// available; throws otherwise.
PolicyVec to_policy_vec(const PolicyArtifact& artifact, const SwitchModel& model);

Action parse_action(const std::string& text);
SwitchState parse_state(const std::string& text);  // "A=[0,1] B=[2]"

}  // namespace qswitch
