#include "qswitch/config.hpp"

#include "qswitch/policy_io.hpp"
#include "qswitch/runner.hpp"
#include "support.hpp"

#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace qswitch;
using qswitch::testing::make_state;

namespace {

// Writes `text` to a fresh temp file and removes it on destruction.
struct TempConfig {
    std::filesystem::path path;

    explicit TempConfig(const std::string& text) {
        path = std::filesystem::temp_directory_path() /
               ("qswitch_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++) + ".conf");
        std::ofstream out(path);
        out << text;
    }
    ~TempConfig() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults mirror the reference configuration") {
    RunConfig cfg = parse_config_file("");
    CHECK(cfg.model.lambda1 == 0.7);
    CHECK(cfg.model.lambda2 == 0.7);
    CHECK(cfg.model.m_star == 3);
    CHECK(cfg.model.f_star == 0.85);
    CHECK(cfg.model.capacity == 3);
    CHECK(cfg.model.f_th == 0.9);
    CHECK(cfg.model.q == 1.0);
    CHECK(cfg.model.allow_distill);
    CHECK(cfg.planner.gamma == 0.9);
    CHECK(cfg.sim.steps == 10000);
    CHECK(cfg.sim.mode == SimMode::Exact);
    CHECK(cfg.sweep == std::vector<double>{0.70, 0.75, 0.80, 0.85, 0.90, 0.95});
    REQUIRE(cfg.policy_modes.size() == 2);
    CHECK(cfg.policy_modes[0] == PolicyMode::Distill);
    CHECK(cfg.policy_modes[1] == PolicyMode::NoDistill);
}

TEST_CASE("config files override defaults field by field") {
    TempConfig file(
        "# run setup\n"
        "lambda1 = 0.5\n"
        "f_th = 0.8   # inline comment\n"
        "steps = 2000\n"
        "mode = quantized\n"
        "sweep = 0.7, 0.8, 0.9\n"
        "policy_modes = no_distill\n");
    RunConfig cfg = parse_config_file(file.path.string());
    CHECK(cfg.model.lambda1 == 0.5);
    CHECK(cfg.model.lambda2 == 0.7);  // untouched default
    CHECK(cfg.model.f_th == 0.8);
    CHECK(cfg.sim.steps == 2000);
    CHECK(cfg.sim.mode == SimMode::Quantized);
    CHECK(cfg.sweep == std::vector<double>{0.7, 0.8, 0.9});
    CHECK(cfg.policy_modes == std::vector<PolicyMode>{PolicyMode::NoDistill});
}

TEST_CASE("invalid configuration names the offending key") {
    TempConfig bad_value("lambda1 = 1.5\n");
    try {
        parse_config_file(bad_value.path.string());
        FAIL("expected a validation error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("lambda1") != std::string::npos);
    }

    TempConfig unknown("lambda9 = 0.5\n");
    try {
        parse_config_file(unknown.path.string());
        FAIL("expected an unknown-key error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("lambda9") != std::string::npos);
    }

    TempConfig not_a_number("lambda1 = fast\n");
    CHECK_THROWS_AS(parse_config_file(not_a_number.path.string()), std::runtime_error);

    CHECK_THROWS_AS(parse_config_file("/nonexistent/qswitch.conf"), std::runtime_error);
}

TEST_CASE("flag values override file values which override defaults") {
    TempConfig file("f_th = 0.8\nsteps = 5000\n");
    RunConfig cfg = parse_config_file(file.path.string());

    ConfigOverrides overrides;
    overrides.f_th = 0.95;
    overrides.mode = SimMode::Quantized;
    apply_overrides(cfg, overrides);

    CHECK(cfg.model.f_th == 0.95);          // flag beats file
    CHECK(cfg.sim.steps == 5000);           // file beats default
    CHECK(cfg.model.lambda1 == 0.7);        // default survives
    CHECK(cfg.sim.mode == SimMode::Quantized);

    ConfigOverrides no_distill;
    no_distill.no_distill = true;
    apply_overrides(cfg, no_distill);
    CHECK_FALSE(cfg.model.allow_distill);
    CHECK(cfg.policy_modes == std::vector<PolicyMode>{PolicyMode::NoDistill});
}

TEST_CASE("a policy artifact round-trips through its text form") {
    ModelParams params;
    params.m_star = 2;
    params.capacity = 2;
    params.f_th = 0.8;
    PlannerConfig planner;
    SolveResult solved = solve_cell(params, planner);

    std::ostringstream artifact;
    write_policy(artifact, *solved.model, solved.plan.policy, planner, solved.plan.rounds,
                 solved.plan.residual);

    std::istringstream in(artifact.str());
    PolicyArtifact parsed = parse_policy(in);
    CHECK(parsed.params.m_star == params.m_star);
    CHECK(parsed.params.capacity == params.capacity);
    CHECK(parsed.params.f_th == params.f_th);
    CHECK(parsed.gamma == planner.gamma);
    CHECK(static_cast<int>(parsed.entries.size()) == solved.model->num_states());

    PolicyVec recovered = to_policy_vec(parsed, *solved.model);
    CHECK(recovered == solved.plan.policy);
}

TEST_CASE("actions and states round-trip through text") {
    for (const Action& action : {Action::wait(), Action::swap(0, 3),
                                 Action::distill(Client::B, 1, 2),
                                 Action::distill(Client::A, 2, 2)})
        CHECK(parse_action(to_string(action)) == action);

    SwitchState state = make_state({0, 1}, {2});
    CHECK(parse_state(to_string(state)) == state);
    CHECK(parse_state("A=[] B=[]") == make_state({}, {}));

    CHECK_THROWS_AS(parse_action("SWAP(0"), std::runtime_error);
    CHECK_THROWS_AS(parse_action("HOLD"), std::runtime_error);
}

TEST_CASE("solve covers the whole space and is reproducible") {
    RunConfig cfg = parse_config_file("");
    std::ostringstream first, second;
    run_solve(cfg, first);
    run_solve(cfg, second);
    CHECK(first.str() == second.str());

    int policy_lines = 0;
    for (const std::string& line : split_lines(first.str()))
        if (line.find(" -> ") != std::string::npos) ++policy_lines;
    CHECK(policy_lines == 1225);
}

TEST_CASE("a model that never forms pairs solves to waiting") {
    RunConfig cfg = parse_config_file("");
    cfg.model.lambda1 = 0.0;
    cfg.model.lambda2 = 0.0;
    std::ostringstream artifact;
    run_solve(cfg, artifact);

    // the chain never leaves the empty state, whose only action is WAIT
    bool found = false;
    for (const std::string& line : split_lines(artifact.str()))
        if (line == "A=[] B=[] -> WAIT") found = true;
    CHECK(found);
}

TEST_CASE("sweep emits one deterministic row per cell") {
    RunConfig cfg = parse_config_file("");
    cfg.sim.steps = 400;  // keep the unit run quick
    cfg.sim.seed = 7;

    std::ostringstream first, second;
    run_sweep(cfg, first);
    run_sweep(cfg, second);
    CHECK(first.str() == second.str());

    auto lines = split_lines(first.str());
    REQUIRE(lines.size() == 13);  // header + 6 thresholds x 2 modes
    CHECK(lines[0] == "f_th,policy_mode,seed,steps,success_count,throughput,avg_fidelity,jitter");
    CHECK(lines[1].rfind("0.7,distill,7,400,", 0) == 0);
    CHECK(lines[2].rfind("0.7,no_distill,8,400,", 0) == 0);
    CHECK(lines[12].rfind("0.95,no_distill,18,400,", 0) == 0);

    // every data row carries the full column count
    for (std::size_t i = 1; i < lines.size(); ++i) {
        int commas = 0;
        for (char c : lines[i])
            if (c == ',') ++commas;
        CHECK(commas == 7);
    }
}

TEST_CASE("a failing cell leaves its metrics empty and the sweep continues") {
    RunConfig cfg = parse_config_file("");
    cfg.sim.steps = 100;
    cfg.planner.max_eval_sweeps = 1;  // evaluation cannot converge

    std::ostringstream csv, diagnostics;
    run_sweep(cfg, csv, &diagnostics);

    auto lines = split_lines(csv.str());
    REQUIRE(lines.size() == 13);
    CHECK(lines[1] == "0.7,distill,1,100,,,,");
    CHECK(lines[12] == "0.95,no_distill,12,100,,,,");
    CHECK(diagnostics.str().find("did not converge") != std::string::npos);
}

TEST_CASE("inspect summarizes a solved artifact") {
    RunConfig cfg = parse_config_file("");
    std::ostringstream artifact;
    run_solve(cfg, artifact);

    std::istringstream in(artifact.str());
    PolicySummary summary = inspect_policy(in);
    CHECK(summary.states == 1225);
    CHECK(summary.wait_states + summary.swap_states + summary.distill_states == 1225);
    CHECK(summary.swap_states > 0);
    CHECK(summary.iterations >= 1);
    CHECK(summary.residual <= cfg.planner.eval_tolerance);
    CHECK(summary.params.f_th == 0.9);

    std::ostringstream pretty;
    print_summary(pretty, summary);
    CHECK(pretty.str().find("states = 1225") != std::string::npos);

    std::istringstream garbage("not a policy\n");
    CHECK_THROWS_AS(inspect_policy(garbage), std::runtime_error);
}

TEST_CASE("simulate honours the configured seed and step count") {
    RunConfig cfg = parse_config_file("");
    cfg.sim.steps = 800;
    cfg.sim.seed = 21;
    MetricsReport first = run_simulate(cfg);
    MetricsReport second = run_simulate(cfg);
    CHECK(first == second);
    CHECK(first.success_count > 0);

    std::ostringstream block;
    print_metrics(block, cfg, first);
    CHECK(block.str().find("steps = 800") != std::string::npos);
    CHECK(block.str().find("throughput = ") != std::string::npos);
}

}  // TEST_SUITE
