#pragma once

#include "qswitch/config.hpp"
#include "qswitch/model.hpp"
#include "qswitch/planner.hpp"
#include "qswitch/simulator.hpp"

#include <iosfwd>
#include <memory>
#include <string>

namespace qswitch {

// Model plus its optimal plan for one (f_th, policy mode) cell.
struct SolveResult {
    std::unique_ptr<SwitchModel> model;
    PlanResult plan;
};

SolveResult solve_cell(ModelParams params, const PlannerConfig& planner);

// Solves the configured model and writes the policy artifact.
void run_solve(const RunConfig& config, std::ostream& artifact_out);

// Solves, then simulates with the configured seed/steps/mode.
MetricsReport run_simulate(const RunConfig& config, std::ostream* trace = nullptr);

// One row per (f_th, policy mode) cell, thresholds outer, modes inner.
// Row seeds are base seed + row index so any cell can be re-run alone.
// A failed cell leaves its metric fields empty and the sweep continues.
// Columns: f_th,policy_mode,seed,steps,success_count,throughput,avg_fidelity,jitter
void run_sweep(const RunConfig& config, std::ostream& csv_out, std::ostream* diagnostics = nullptr);

// Human-readable metrics block, one "key = value" line per field.
void print_metrics(std::ostream& out, const RunConfig& config, const MetricsReport& report);

struct PolicySummary {
    ModelParams params;
    int states = 0;
    int wait_states = 0;
    int swap_states = 0;
    int distill_states = 0;
    int iterations = 0;
    double residual = 0.0;
};

// Parses an artifact, rebuilds the model it names, and verifies the policy
// is total and valid for it.
PolicySummary inspect_policy(std::istream& in);

void print_summary(std::ostream& out, const PolicySummary& summary);

}  // namespace qswitch
