// Command-line front-end: solve optimal switch policies, simulate them, and
// sweep fidelity thresholds into CSV reports.

#include "qswitch/config.hpp"
#include "qswitch/model.hpp"
#include "qswitch/policy_io.hpp"
#include "qswitch/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

struct CommonArgs {
    std::string config_path;
    qswitch::ConfigOverrides overrides;
    double f_th = 0.0;
    bool no_distill = false;
    std::uint64_t seed = 0;
    int steps = 0;
    std::string mode;
    std::string out_path;
    std::string trace_path;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_sim_flags) {
    cmd->add_option("--config", args.config_path, "Configuration file (key = value lines)");
    auto* f_th = cmd->add_option("--f-th", args.f_th, "End-to-end fidelity threshold");
    auto* nd = cmd->add_flag("--no-distill", args.no_distill, "Disable the distillation action");
    f_th->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out", args.out_path, "Output file (default: stdout)");
    if (with_sim_flags) {
        cmd->add_option("--seed", args.seed, "Simulation seed");
        cmd->add_option("--steps", args.steps, "Simulated time steps")->check(CLI::PositiveNumber);
        cmd->add_option("--mode", args.mode, "Fidelity tracking: exact or quantized")
            ->check(CLI::IsMember({"exact", "quantized"}));
    }
    (void)nd;
}

bool flag_given(const CLI::App* cmd, const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

qswitch::RunConfig load_config(const CLI::App* cmd, CommonArgs& args) {
    qswitch::RunConfig config = qswitch::parse_config_file(args.config_path);
    if (flag_given(cmd, "--f-th")) args.overrides.f_th = args.f_th;
    if (flag_given(cmd, "--no-distill")) args.overrides.no_distill = true;
    if (flag_given(cmd, "--seed")) args.overrides.seed = args.seed;
    if (flag_given(cmd, "--steps")) args.overrides.steps = args.steps;
    if (flag_given(cmd, "--mode"))
        args.overrides.mode =
            args.mode == "exact" ? qswitch::SimMode::Exact : qswitch::SimMode::Quantized;
    if (flag_given(cmd, "--out")) args.overrides.out_path = args.out_path;
    if (flag_given(cmd, "--trace")) args.overrides.trace_path = args.trace_path;
    qswitch::apply_overrides(config, args.overrides);
    return config;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

int fail(const char* stage, const std::exception& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-client quantum switch: optimal wait/swap/distill policies and simulation"};
    app.require_subcommand(1);

    CommonArgs solve_args, sim_args, sweep_args;
    std::string dump_model_path, policy_path;

    CLI::App* solve = app.add_subcommand("solve", "Compute the optimal policy and write it out");
    add_common_flags(solve, solve_args, false);
    solve->add_option("--dump-model", dump_model_path,
                      "Also write the full model tables to this file");

    CLI::App* simulate = app.add_subcommand("simulate", "Solve, then simulate the policy");
    add_common_flags(simulate, sim_args, true);
    simulate->add_option("--trace", sim_args.trace_path, "Write a per-step trace to this file");

    CLI::App* sweep = app.add_subcommand("sweep",
                                         "Solve and simulate every (threshold, mode) cell");
    add_common_flags(sweep, sweep_args, true);

    CLI::App* inspect = app.add_subcommand("inspect-policy", "Validate and summarize an artifact");
    inspect->add_option("policy_file", policy_path, "Policy artifact to inspect")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            qswitch::RunConfig config;
            try {
                config = load_config(solve, solve_args);
            } catch (const std::exception& e) {
                return fail("config", e);
            }
            if (!dump_model_path.empty()) {
                qswitch::SwitchModel model(config.model);
                auto out = open_output(dump_model_path);
                qswitch::dump_model(model, out);
            }
            if (config.out_path.empty()) {
                qswitch::run_solve(config, std::cout);
            } else {
                auto out = open_output(config.out_path);
                qswitch::run_solve(config, out);
                std::cerr << "policy written to " << config.out_path << "\n";
            }
            return 0;
        }
        if (simulate->parsed()) {
            qswitch::RunConfig config;
            try {
                config = load_config(simulate, sim_args);
            } catch (const std::exception& e) {
                return fail("config", e);
            }
            std::ofstream trace;
            if (!config.trace_path.empty()) trace = open_output(config.trace_path);
            auto report =
                qswitch::run_simulate(config, config.trace_path.empty() ? nullptr : &trace);
            qswitch::print_metrics(std::cout, config, report);
            if (!config.out_path.empty()) {
                auto out = open_output(config.out_path);
                qswitch::print_metrics(out, config, report);
            }
            return 0;
        }
        if (sweep->parsed()) {
            qswitch::RunConfig config;
            try {
                config = load_config(sweep, sweep_args);
            } catch (const std::exception& e) {
                return fail("config", e);
            }
            if (config.out_path.empty()) {
                qswitch::run_sweep(config, std::cout, &std::cerr);
            } else {
                auto out = open_output(config.out_path);
                qswitch::run_sweep(config, out, &std::cerr);
                std::cerr << "results written to " << config.out_path << "\n";
            }
            return 0;
        }
        // inspect-policy
        std::ifstream in(policy_path);
        if (!in) throw std::runtime_error("cannot open policy file: " + policy_path);
        qswitch::print_summary(std::cout, qswitch::inspect_policy(in));
        return 0;
    } catch (const std::exception& e) {
        const char* stage = solve->parsed()      ? "solve"
                            : simulate->parsed() ? "simulate"
                            : sweep->parsed()    ? "sweep"
                                                 : "inspect-policy";
        return fail(stage, e);
    }
}
