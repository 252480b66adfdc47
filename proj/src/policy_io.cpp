#include "qswitch/policy_io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qswitch {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad_line(const std::string& line, const char* why) {
    throw std::runtime_error(std::string("bad policy line (") + why + "): " + line);
}

std::vector<int> parse_bracketed_ages(const std::string& text, const std::string& line) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        bad_line(line, "expected [..] age list");
    std::vector<int> ages;
    std::string inner = text.substr(1, text.size() - 2);
    if (inner.empty()) return ages;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t pos = 0;
        int age = std::stoi(item, &pos);
        if (pos != item.size() || age < 0) bad_line(line, "invalid age");
        ages.push_back(age);
    }
    return ages;
}

void parse_header_field(PolicyArtifact& artifact, const std::string& key,
                        const std::string& value) {
    if (key == "lambda1") artifact.params.lambda1 = std::stod(value);
    else if (key == "lambda2") artifact.params.lambda2 = std::stod(value);
    else if (key == "m_star") artifact.params.m_star = std::stoi(value);
    else if (key == "f_star") artifact.params.f_star = std::stod(value);
    else if (key == "capacity") artifact.params.capacity = std::stoi(value);
    else if (key == "f_th") artifact.params.f_th = std::stod(value);
    else if (key == "distill") artifact.params.allow_distill = (value == "true");
    else if (key == "gamma") artifact.gamma = std::stod(value);
    else if (key == "eval_tolerance") artifact.eval_tolerance = std::stod(value);
    else if (key == "iterations") artifact.iterations = std::stoi(value);
    else if (key == "residual") artifact.residual = std::stod(value);
    else if (key == "states") { /* informational; recomputed from params */ }
    else throw std::runtime_error("unknown policy header key: " + key);
}

}  // namespace

void write_policy(std::ostream& out, const SwitchModel& model, const PolicyVec& policy,
                  const PlannerConfig& planner, int iterations, double residual) {
    if (static_cast<int>(policy.size()) != model.num_states())
        throw std::invalid_argument("policy does not cover the model's state space");
    const ModelParams& p = model.params();
    out << "# qswitch policy v1\n";
    out << "# lambda1 = " << format_double(p.lambda1) << "\n";
    out << "# lambda2 = " << format_double(p.lambda2) << "\n";
    out << "# m_star = " << p.m_star << "\n";
    out << "# f_star = " << format_double(p.f_star) << "\n";
    out << "# capacity = " << p.capacity << "\n";
    out << "# f_th = " << format_double(p.f_th) << "\n";
    out << "# distill = " << (p.allow_distill ? "true" : "false") << "\n";
    out << "# gamma = " << format_double(planner.gamma) << "\n";
    out << "# eval_tolerance = " << format_double(planner.eval_tolerance) << "\n";
    out << "# states = " << model.num_states() << "\n";
    out << "# iterations = " << iterations << "\n";
    out << "# residual = " << format_double(residual) << "\n";
    for (int s = 0; s < model.num_states(); ++s)
        out << to_string(model.states()[s]) << " -> "
            << to_string(model.actions(s)[policy[s]]) << "\n";
}

SwitchState parse_state(const std::string& text) {
    std::stringstream ss(text);
    std::string part_a, part_b;
    if (!(ss >> part_a >> part_b) || part_a.rfind("A=", 0) != 0 || part_b.rfind("B=", 0) != 0)
        bad_line(text, "expected A=[..] B=[..]");
    return {ClientBuffer{parse_bracketed_ages(part_a.substr(2), text)},
            ClientBuffer{parse_bracketed_ages(part_b.substr(2), text)}};
}

Action parse_action(const std::string& text) {
    if (text == "WAIT") return Action::wait();
    auto parse_args = [&](size_t prefix_len) {
        if (text.back() != ')') bad_line(text, "expected closing parenthesis");
        std::string inner = text.substr(prefix_len, text.size() - prefix_len - 1);
        std::vector<std::string> parts;
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    if (text.rfind("SWAP(", 0) == 0) {
        auto args = parse_args(5);
        if (args.size() != 2) bad_line(text, "SWAP takes two ages");
        return Action::swap(std::stoi(args[0]), std::stoi(args[1]));
    }
    if (text.rfind("DISTILL(", 0) == 0) {
        auto args = parse_args(8);
        if (args.size() != 3 || (args[0] != "A" && args[0] != "B"))
            bad_line(text, "DISTILL takes a client and two ages");
        return Action::distill(args[0] == "A" ? Client::A : Client::B, std::stoi(args[1]),
                               std::stoi(args[2]));
    }
    bad_line(text, "unknown action");
}

PolicyArtifact parse_policy(std::istream& in) {
    PolicyArtifact artifact;
    std::string line;
    bool saw_magic = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line == "# qswitch policy v1") {
                saw_magic = true;
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            std::string value = line.substr(eq + 1);
            auto strip = [](std::string& s) {
                s.erase(0, s.find_first_not_of(" \t"));
                s.erase(s.find_last_not_of(" \t") + 1);
            };
            strip(key);
            strip(value);
            parse_header_field(artifact, key, value);
            continue;
        }
        auto arrow = line.find(" -> ");
        if (arrow == std::string::npos) bad_line(line, "missing ' -> '");
        artifact.entries.emplace_back(parse_state(line.substr(0, arrow)),
                                      parse_action(line.substr(arrow + 4)));
    }
    if (!saw_magic) throw std::runtime_error("not a qswitch policy file (missing header)");
    return artifact;
}

PolicyVec to_policy_vec(const PolicyArtifact& artifact, const SwitchModel& model) {
    if (static_cast<int>(artifact.entries.size()) != model.num_states())
        throw std::runtime_error("policy file covers " + std::to_string(artifact.entries.size()) +
                                 " states, model has " + std::to_string(model.num_states()));
    PolicyVec policy(model.num_states(), -1);
    for (const auto& [state, action] : artifact.entries) {
        int idx = model.state_index(state);
        if (policy[idx] != -1)
            throw std::runtime_error("duplicate policy entry for state " + to_string(state));
        const auto& actions = model.actions(idx);
        auto it = std::find(actions.begin(), actions.end(), action);
        if (it == actions.end())
            throw std::runtime_error("action " + to_string(action) + " not available in state " +
                                     to_string(state));
        policy[idx] = static_cast<int>(it - actions.begin());
    }
    return policy;
}

}  // namespace qswitch
