#pragma once

#include <vector>

namespace qswitch {

// Flat tables of a finite MDP: per state, per action, an immediate reward
// and a sparse next-state distribution. The planner operates on these tables
// only, so synthetic models can be fed to it directly in tests.

struct MdpTransition {
    int next = 0;
    double prob = 0.0;
};

struct MdpChoice {
    double reward = 0.0;
    std::vector<MdpTransition> outcomes;
};

struct FiniteMdp {
    std::vector<std::vector<MdpChoice>> choices;  // [state][action]

    int num_states() const { return static_cast<int>(choices.size()); }
};

}  // namespace qswitch
