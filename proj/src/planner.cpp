#include "qswitch/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qswitch {

namespace {

double q_value(const MdpChoice& choice, const ValueVec& values, double gamma) {
    double expected = 0.0;
    for (const auto& t : choice.outcomes) expected += t.prob * values[t.next];
    return choice.reward + gamma * expected;
}

void check_policy_total(const FiniteMdp& mdp, const PolicyVec& policy) {
    if (static_cast<int>(policy.size()) != mdp.num_states())
        throw std::invalid_argument("policy does not cover the state space");
    for (int s = 0; s < mdp.num_states(); ++s)
        if (policy[s] < 0 || policy[s] >= static_cast<int>(mdp.choices[s].size()))
            throw std::invalid_argument("policy assigns an unavailable action in state " +
                                        std::to_string(s));
}

[[noreturn]] void throw_no_convergence(const char* what, int sweeps, double residual) {
    std::ostringstream msg;
    msg << what << " did not converge within " << sweeps
        << " sweeps; last residual = " << residual;
    throw std::runtime_error(msg.str());
}

}  // namespace

void PlannerConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in [0, 1)");
    if (!(eval_tolerance > 0.0)) throw std::domain_error("eval_tolerance must be positive");
    if (max_eval_sweeps < 1) throw std::domain_error("max_eval_sweeps must be at least 1");
    if (max_improvement_rounds < 1)
        throw std::domain_error("max_improvement_rounds must be at least 1");
}

ValueVec policy_evaluation(const FiniteMdp& mdp, const PolicyVec& policy,
                           const PlannerConfig& config) {
    config.validate();
    check_policy_total(mdp, policy);
    const int n = mdp.num_states();
    ValueVec values(n, 0.0), next(n, 0.0);
    double change = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < config.max_eval_sweeps; ++sweep) {
        change = 0.0;
        for (int s = 0; s < n; ++s) {
            next[s] = q_value(mdp.choices[s][policy[s]], values, config.gamma);
            change = std::max(change, std::abs(next[s] - values[s]));
        }
        values.swap(next);
        // Fixed-policy residual of the new iterate is at most gamma * change.
        if (change <= config.eval_tolerance) return values;
    }
    throw_no_convergence("policy evaluation", config.max_eval_sweeps, change);
}

PolicyVec policy_improvement(const FiniteMdp& mdp, const ValueVec& values,
                             const PlannerConfig& config) {
    config.validate();
    if (static_cast<int>(values.size()) != mdp.num_states())
        throw std::invalid_argument("value function does not cover the state space");
    const int n = mdp.num_states();
    PolicyVec policy(n, 0);
    for (int s = 0; s < n; ++s) {
        const auto& choices = mdp.choices[s];
        double best = q_value(choices[0], values, config.gamma);
        for (int a = 1; a < static_cast<int>(choices.size()); ++a) {
            double q = q_value(choices[a], values, config.gamma);
            if (q > best) {  // strict: ties keep the earlier action
                best = q;
                policy[s] = a;
            }
        }
    }
    return policy;
}

PlanResult policy_iteration(const FiniteMdp& mdp, const PlannerConfig& config) {
    config.validate();
    PolicyVec policy(mdp.num_states(), 0);  // all-Wait start
    for (int round = 1; round <= config.max_improvement_rounds; ++round) {
        ValueVec values = policy_evaluation(mdp, policy, config);
        PolicyVec improved = policy_improvement(mdp, values, config);
        if (improved == policy) {
            const double residual = bellman_residual(mdp, values, config.gamma);
            return {std::move(policy), std::move(values), round, residual};
        }
        policy = std::move(improved);
    }
    throw std::runtime_error("policy iteration did not stabilize within " +
                             std::to_string(config.max_improvement_rounds) + " rounds");
}

ValueVec value_iteration(const FiniteMdp& mdp, const PlannerConfig& config) {
    config.validate();
    const int n = mdp.num_states();
    // Stop threshold on the successive change; gamma = 0 converges in one
    // sweep, so any change is acceptable there.
    const double threshold = config.gamma > 0.0
                                 ? config.eval_tolerance * (1.0 - config.gamma) / config.gamma
                                 : std::numeric_limits<double>::infinity();
    ValueVec values(n, 0.0), next(n, 0.0);
    double change = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < config.max_eval_sweeps; ++sweep) {
        change = 0.0;
        for (int s = 0; s < n; ++s) {
            const auto& choices = mdp.choices[s];
            double best = q_value(choices[0], values, config.gamma);
            for (size_t a = 1; a < choices.size(); ++a)
                best = std::max(best, q_value(choices[a], values, config.gamma));
            next[s] = best;
            change = std::max(change, std::abs(best - values[s]));
        }
        values.swap(next);
        if (change <= threshold) return values;
    }
    throw_no_convergence("value iteration", config.max_eval_sweeps, change);
}

double bellman_residual(const FiniteMdp& mdp, const ValueVec& values, double gamma) {
    double residual = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) {
        const auto& choices = mdp.choices[s];
        double best = q_value(choices[0], values, gamma);
        for (size_t a = 1; a < choices.size(); ++a)
            best = std::max(best, q_value(choices[a], values, gamma));
        residual = std::max(residual, std::abs(best - values[s]));
    }
    return residual;
}

}  // namespace qswitch
