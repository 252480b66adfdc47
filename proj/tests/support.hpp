#pragma once

// Shared helpers for the test binaries. The oracles below recompute
// quantities the library already provides, but through different algorithms
// (brute-force enumeration, dense linear algebra, power iteration), so that
// agreement between the two is evidence rather than tautology.

#include "qswitch/finite_mdp.hpp"
#include "qswitch/model.hpp"
#include "qswitch/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qswitch::testing {

inline SwitchState make_state(std::vector<int> a, std::vector<int> b) {
    return SwitchState{ClientBuffer{std::move(a)}, ClientBuffer{std::move(b)}};
}

inline ModelParams reference_params(double f_th, bool allow_distill) {
    ModelParams p;  // defaults are the reference configuration
    p.f_th = f_th;
    p.allow_distill = allow_distill;
    return p;
}

// All sorted age vectors with entries in {0..m_star} and length 0..capacity,
// produced by a plain odometer over unsorted tuples plus set-deduplication.
inline std::vector<std::vector<int>> oracle_buffers(int m_star, int capacity) {
    std::set<std::vector<int>> seen;
    seen.insert(std::vector<int>{});
    for (int len = 1; len <= capacity; ++len) {
        std::vector<int> tuple(static_cast<std::size_t>(len), 0);
        while (true) {
            std::vector<int> sorted = tuple;
            std::sort(sorted.begin(), sorted.end());
            seen.insert(std::move(sorted));
            int i = len - 1;
            while (i >= 0 && tuple[static_cast<std::size_t>(i)] == m_star) {
                tuple[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
            ++tuple[static_cast<std::size_t>(i)];
        }
    }
    return {seen.begin(), seen.end()};
}

inline std::set<std::string> oracle_state_names(const ModelParams& params) {
    std::set<std::string> names;
    auto buffers = oracle_buffers(params.m_star, params.capacity);
    for (const auto& a : buffers)
        for (const auto& b : buffers)
            names.insert(to_string(SwitchState{ClientBuffer{a}, ClientBuffer{b}}));
    return names;
}

// Exact value of a fixed policy: solves (I - gamma * P_pi) V = r_pi by
// Gaussian elimination with partial pivoting. Shares no code with the
// planner's fixed-point sweeps.
inline ValueVec solve_policy_dense(const FiniteMdp& mdp, const PolicyVec& policy, double gamma) {
    const int n = mdp.num_states();
    std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    for (int s = 0; s < n; ++s) {
        auto& row = m[static_cast<std::size_t>(s)];
        const MdpChoice& choice = mdp.choices[s][static_cast<std::size_t>(policy[s])];
        row[static_cast<std::size_t>(s)] = 1.0;
        for (const MdpTransition& t : choice.outcomes)
            row[static_cast<std::size_t>(t.next)] -= gamma * t.prob;
        row[static_cast<std::size_t>(n)] = choice.reward;
    }
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        std::swap(m[static_cast<std::size_t>(col)], m[static_cast<std::size_t>(pivot)]);
        if (std::abs(m[col][col]) < 1e-14) throw std::runtime_error("singular policy system");
        for (int r = col + 1; r < n; ++r) {
            double factor = m[r][col] / m[col][col];
            if (factor == 0.0) continue;
            for (int k = col; k <= n; ++k) m[r][k] -= factor * m[col][k];
        }
    }
    ValueVec values(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = m[r][static_cast<std::size_t>(n)];
        for (int k = r + 1; k < n; ++k) acc -= m[r][k] * values[static_cast<std::size_t>(k)];
        values[static_cast<std::size_t>(r)] = acc / m[r][r];
    }
    return values;
}

// Every deterministic policy of a small MDP, in odometer order.
inline std::vector<PolicyVec> all_policies(const FiniteMdp& mdp, std::size_t limit = 1u << 20) {
    std::size_t total = 1;
    for (const auto& choices : mdp.choices) {
        total *= choices.size();
        if (total > limit) throw std::runtime_error("policy space too large to enumerate");
    }
    std::vector<PolicyVec> out;
    out.reserve(total);
    PolicyVec current(mdp.choices.size(), 0);
    while (true) {
        out.push_back(current);
        int i = static_cast<int>(current.size()) - 1;
        while (i >= 0 && current[static_cast<std::size_t>(i)] + 1 ==
                             static_cast<int>(mdp.choices[static_cast<std::size_t>(i)].size())) {
            current[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++current[static_cast<std::size_t>(i)];
    }
    return out;
}

// Optimal values by brute force: the pointwise maximum over every
// deterministic policy, each evaluated exactly with the dense solver.
inline ValueVec exhaustive_optimal_values(const FiniteMdp& mdp, double gamma) {
    ValueVec best(static_cast<std::size_t>(mdp.num_states()),
                  -std::numeric_limits<double>::infinity());
    for (const PolicyVec& policy : all_policies(mdp)) {
        ValueVec v = solve_policy_dense(mdp, policy, gamma);
        for (std::size_t s = 0; s < best.size(); ++s) best[s] = std::max(best[s], v[s]);
    }
    return best;
}

// Stationary distribution of the policy-induced chain, by power iteration
// from a point mass on `start`.
inline std::vector<double> stationary_distribution(const FiniteMdp& mdp, const PolicyVec& policy,
                                                   int start, double tol = 1e-13,
                                                   int max_iters = 100000) {
    const std::size_t n = static_cast<std::size_t>(mdp.num_states());
    std::vector<double> dist(n, 0.0), next(n, 0.0);
    dist[static_cast<std::size_t>(start)] = 1.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (dist[s] == 0.0) continue;
            for (const MdpTransition& t :
                 mdp.choices[s][static_cast<std::size_t>(policy[s])].outcomes)
                next[static_cast<std::size_t>(t.next)] += dist[s] * t.prob;
        }
        double delta = 0.0;
        for (std::size_t s = 0; s < n; ++s) delta += std::abs(next[s] - dist[s]);
        dist.swap(next);
        if (delta < tol) return dist;
    }
    throw std::runtime_error("stationary distribution did not converge");
}

// Long-run reward rate of the induced chain from its stationary distribution.
inline double stationary_reward_rate(const FiniteMdp& mdp, const PolicyVec& policy, int start) {
    std::vector<double> dist = stationary_distribution(mdp, policy, start);
    double rate = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s)
        rate += dist[s] * mdp.choices[s][static_cast<std::size_t>(policy[s])].reward;
    return rate;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("mean_se needs at least two samples");
    const double n = static_cast<double>(xs.size());
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= n - 1.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace qswitch::testing
