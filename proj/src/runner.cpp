#include "qswitch/runner.hpp"

#include "qswitch/policy_io.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace qswitch {

namespace {

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

SolveResult solve_cell(ModelParams params, const PlannerConfig& planner) {
    SolveResult result;
    result.model = std::make_unique<SwitchModel>(std::move(params));
    result.plan = policy_iteration(result.model->mdp(), planner);
    return result;
}

void run_solve(const RunConfig& config, std::ostream& artifact_out) {
    SolveResult solved = solve_cell(config.model, config.planner);
    write_policy(artifact_out, *solved.model, solved.plan.policy, config.planner,
                 solved.plan.rounds, solved.plan.residual);
}

MetricsReport run_simulate(const RunConfig& config, std::ostream* trace) {
    SolveResult solved = solve_cell(config.model, config.planner);
    return simulate(*solved.model, solved.plan.policy, config.sim, trace);
}

void run_sweep(const RunConfig& config, std::ostream& csv_out, std::ostream* diagnostics) {
    csv_out << "f_th,policy_mode,seed,steps,success_count,throughput,avg_fidelity,jitter\n";
    int row = 0;
    for (double f_th : config.sweep) {
        for (PolicyMode mode : config.policy_modes) {
            std::uint64_t seed = config.sim.seed + static_cast<std::uint64_t>(row);
            csv_out << format_metric(f_th) << "," << to_string(mode) << "," << seed << ","
                    << config.sim.steps << ",";
            try {
                ModelParams params = config.model;
                params.f_th = f_th;
                params.allow_distill = (mode == PolicyMode::Distill);
                SolveResult solved = solve_cell(params, config.planner);
                SimConfig sim = config.sim;
                sim.seed = seed;
                MetricsReport report = simulate(*solved.model, solved.plan.policy, sim);
                csv_out << report.success_count << "," << format_metric(report.throughput) << ",";
                if (report.avg_fidelity) csv_out << format_metric(*report.avg_fidelity);
                csv_out << ",";
                if (report.jitter) csv_out << format_metric(*report.jitter);
            } catch (const std::exception& e) {
                // Leave the metric fields empty; the sweep goes on.
                csv_out << ",,,";
                if (diagnostics)
                    *diagnostics << "sweep cell f_th=" << format_metric(f_th) << " mode="
                                 << to_string(mode) << " failed: " << e.what() << "\n";
            }
            csv_out << "\n";
            ++row;
        }
    }
}

void print_metrics(std::ostream& out, const RunConfig& config, const MetricsReport& report) {
    out << "f_th = " << format_metric(config.model.f_th) << "\n";
    out << "policy_mode = " << (config.model.allow_distill ? "distill" : "no_distill") << "\n";
    out << "mode = " << (config.sim.mode == SimMode::Exact ? "exact" : "quantized") << "\n";
    out << "seed = " << config.sim.seed << "\n";
    out << "steps = " << config.sim.steps << "\n";
    out << "success_count = " << report.success_count << "\n";
    out << "throughput = " << format_metric(report.throughput) << "\n";
    out << "avg_fidelity = "
        << (report.avg_fidelity ? format_metric(*report.avg_fidelity) : "n/a") << "\n";
    out << "jitter = " << (report.jitter ? format_metric(*report.jitter) : "n/a") << "\n";
}

PolicySummary inspect_policy(std::istream& in) {
    PolicyArtifact artifact = parse_policy(in);
    SwitchModel model(artifact.params);
    PolicyVec policy = to_policy_vec(artifact, model);

    PolicySummary summary;
    summary.params = artifact.params;
    summary.states = model.num_states();
    summary.iterations = artifact.iterations;
    summary.residual = artifact.residual;
    for (int s = 0; s < model.num_states(); ++s) {
        switch (model.actions(s)[policy[s]].kind) {
            case ActionKind::Wait: ++summary.wait_states; break;
            case ActionKind::Swap: ++summary.swap_states; break;
            case ActionKind::Distill: ++summary.distill_states; break;
        }
    }
    return summary;
}

void print_summary(std::ostream& out, const PolicySummary& summary) {
    const ModelParams& p = summary.params;
    out << "states = " << summary.states << "\n";
    out << "lambda1 = " << format_metric(p.lambda1) << ", lambda2 = " << format_metric(p.lambda2)
        << ", m_star = " << p.m_star << ", f_star = " << format_metric(p.f_star)
        << ", capacity = " << p.capacity << "\n";
    out << "f_th = " << format_metric(p.f_th) << ", distill = "
        << (p.allow_distill ? "enabled" : "disabled") << "\n";
    out << "actions: wait in " << summary.wait_states << " states, swap in "
        << summary.swap_states << ", distill in " << summary.distill_states << "\n";
    out << "solver: " << summary.iterations << " iterations, residual = "
        << format_metric(summary.residual) << "\n";
}

}  // namespace qswitch
