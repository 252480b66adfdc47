#pragma once

#include "qswitch/finite_mdp.hpp"

#include <vector>

namespace qswitch {

// Discounted infinite-horizon criterion. The evaluation tolerance bounds the
// max-norm Bellman residual of returned value functions; it is far below the
// noise floor of any simulated metric.
struct PlannerConfig {
    double gamma = 0.9;
    double eval_tolerance = 1e-10;
    int max_eval_sweeps = 10000;
    int max_improvement_rounds = 500;

    void validate() const;
};

// One chosen action index per state (indices into the model's per-state
// action lists; index 0 is Wait for switch models).
using PolicyVec = std::vector<int>;
using ValueVec = std::vector<double>;

struct PlanResult {
    PolicyVec policy;
    ValueVec values;
    int rounds = 0;       // improvement rounds until the policy was stable
    double residual = 0;  // optimal Bellman residual of the returned values
};

// Value of a fixed policy by synchronous sweeps, to a max-norm Bellman
// residual of at most eval_tolerance. Throws if the sweep budget runs out.
ValueVec policy_evaluation(const FiniteMdp& mdp, const PolicyVec& policy,
                           const PlannerConfig& config);

// Greedy policy for the given values. Ties keep the earliest action in the
// deterministic per-state order, so Wait wins ties against any swap.
PolicyVec policy_improvement(const FiniteMdp& mdp, const ValueVec& values,
                             const PlannerConfig& config);

// Alternates evaluation and improvement from the all-Wait policy until the
// policy stops changing.
PlanResult policy_iteration(const FiniteMdp& mdp, const PlannerConfig& config);

// Independent cross-check: iterates the optimal Bellman operator until the
// successive max-norm change drops below eval_tolerance * (1 - gamma) / gamma.
ValueVec value_iteration(const FiniteMdp& mdp, const PlannerConfig& config);

// Max-norm distance between values and one application of the optimal
// Bellman operator.
double bellman_residual(const FiniteMdp& mdp, const ValueVec& values, double gamma);

}  // namespace qswitch
