#pragma once

#include "qswitch/model.hpp"
#include "qswitch/planner.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace qswitch {

// Exact mode carries real-valued fidelities through every operation and
// counts a delivery only when the exact swap output clears the threshold.
// Quantized mode pins every fidelity to the age grid, which makes the
// simulated law coincide with the MDP's transition law.
enum class SimMode { Exact, Quantized };

struct SimConfig {
    std::uint64_t seed = 1;
    int steps = 10000;
    SimMode mode = SimMode::Exact;

    void validate() const;
};

// One stored pair: the exact Werner fidelity and the quantized age label the
// policy sees. For never-distilled pairs the two agree (fidelity equals
// exp(-alpha * age)); a distilled pair keeps its exact fidelity while the
// label tracks the nearest grid age.
struct LivePair {
    double fidelity = 1.0;
    int age = 0;
};

struct MetricsReport {
    double throughput = 0.0;               // successes per time step
    std::optional<double> avg_fidelity;    // absent when no successes
    std::optional<double> jitter;          // absent below two successes
    int success_count = 0;
    std::vector<int> success_times;        // 1-based step indices

    bool operator==(const MetricsReport&) const = default;
};

// throughput = count / steps; avg_fidelity is the arithmetic mean of the
// delivered fidelities; jitter is the population standard deviation of the
// gaps between consecutive success times.
MetricsReport compute_metrics(const std::vector<int>& success_times,
                              const std::vector<double>& delivered_fidelities, int steps);

// Sum of gamma^t * rewards[t].
double discounted_return(const std::vector<double>& rewards, double gamma);

// Sequential simulation of the switch under a fixed policy. Per step the
// generator is consumed in a fixed order: arrival draw for client A, arrival
// draw for client B, then the distillation outcome when the action needs
// one. Identical (seed, policy, params) reproduce the run bit for bit.
class SimEngine {
public:
    SimEngine(const SwitchModel& model, const PolicyVec& policy, std::uint64_t seed,
              SimMode mode);

    struct StepEvents {
        Action action;
        double reward = 0.0;
        bool success = false;
        double delivered_fidelity = 0.0;  // meaningful only when success
    };

    // Advances one time step: policy action on the current decision state,
    // then aging and discard, then arrivals.
    StepEvents step();

    SwitchState quantized_state() const;
    const std::vector<LivePair>& buffer(Client c) const { return c == Client::A ? a_ : b_; }

private:
    double uniform();  // in [0, 1)
    const Action& lookup_action() const;
    // First stored pair with the given label; among equal labels the pair
    // with the highest exact fidelity. Removes and returns it.
    LivePair take_pair(std::vector<LivePair>& buffer, int age);
    void insert_pair(std::vector<LivePair>& buffer, LivePair pair);
    void admit_fresh(std::vector<LivePair>& buffer);
    void age_pairs(std::vector<LivePair>& buffer);

    const SwitchModel& model_;
    const PolicyVec& policy_;
    SimMode mode_;
    std::mt19937_64 rng_;
    double decay_factor_;              // exp(-alpha)
    std::vector<double> grid_fidelity_;  // fidelity_at_age per age
    std::vector<LivePair> a_, b_;
    mutable std::vector<int> scratch_a_, scratch_b_;
};

// Runs config.steps steps and reports the metrics over the full run. When a
// trace stream is given, one record per step is written:
//   step=<t> state="A=[..] B=[..]" action=<a> reward=<r> success=<0|1> [delivered=<f>]
MetricsReport simulate(const SwitchModel& model, const PolicyVec& policy,
                       const SimConfig& config, std::ostream* trace = nullptr);

}  // namespace qswitch
