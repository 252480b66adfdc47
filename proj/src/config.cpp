#include "qswitch/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qswitch {

namespace {

[[noreturn]] void bad_value(const std::string& source, const std::string& key,
                            const std::string& why) {
    throw std::runtime_error(source + ": " + key + ": " + why);
}

double parse_double(const std::string& source, const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        bad_value(source, key, "'" + value + "' is not a number");
    }
}

long long parse_int(const std::string& source, const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        bad_value(source, key, "'" + value + "' is not an integer");
    }
}

bool parse_bool(const std::string& source, const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    bad_value(source, key, "expected true or false");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

const char* to_string(PolicyMode mode) {
    return mode == PolicyMode::Distill ? "distill" : "no_distill";
}

void RunConfig::validate() const {
    try {
        model.validate();
        planner.validate();
        sim.validate();
    } catch (const std::domain_error& e) {
        throw std::runtime_error(std::string("invalid configuration: ") + e.what());
    }
    if (sweep.empty()) throw std::runtime_error("invalid configuration: sweep: empty list");
    for (size_t i = 0; i < sweep.size(); ++i) {
        if (!(sweep[i] >= 0.0 && sweep[i] <= 1.0))
            throw std::runtime_error("invalid configuration: sweep: values must lie in [0, 1]");
        if (i > 0 && !(sweep[i] > sweep[i - 1]))
            throw std::runtime_error("invalid configuration: sweep: values must be strictly increasing");
    }
    if (policy_modes.empty())
        throw std::runtime_error("invalid configuration: policy_modes: empty list");
}

void apply_config_text(RunConfig& config, std::istream& in, const std::string& source) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t"));
        line.erase(line.find_last_not_of(" \t") + 1);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(source + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));

        if (key == "lambda1") config.model.lambda1 = parse_double(source, key, value);
        else if (key == "lambda2") config.model.lambda2 = parse_double(source, key, value);
        else if (key == "m_star") config.model.m_star = static_cast<int>(parse_int(source, key, value));
        else if (key == "f_star") config.model.f_star = parse_double(source, key, value);
        else if (key == "capacity") config.model.capacity = static_cast<int>(parse_int(source, key, value));
        else if (key == "f_th") config.model.f_th = parse_double(source, key, value);
        else if (key == "distill") config.model.allow_distill = parse_bool(source, key, value);
        else if (key == "gamma") config.planner.gamma = parse_double(source, key, value);
        else if (key == "eval_tolerance") config.planner.eval_tolerance = parse_double(source, key, value);
        else if (key == "max_eval_sweeps") config.planner.max_eval_sweeps = static_cast<int>(parse_int(source, key, value));
        else if (key == "max_improvement_rounds") config.planner.max_improvement_rounds = static_cast<int>(parse_int(source, key, value));
        else if (key == "seed") config.sim.seed = static_cast<std::uint64_t>(parse_int(source, key, value));
        else if (key == "steps") config.sim.steps = static_cast<int>(parse_int(source, key, value));
        else if (key == "mode") {
            if (value == "exact") config.sim.mode = SimMode::Exact;
            else if (value == "quantized") config.sim.mode = SimMode::Quantized;
            else bad_value(source, key, "expected exact or quantized");
        } else if (key == "sweep") {
            config.sweep.clear();
            for (const auto& item : split_list(value))
                config.sweep.push_back(parse_double(source, key, item));
        } else if (key == "policy_modes") {
            config.policy_modes.clear();
            for (const auto& item : split_list(value)) {
                if (item == "distill") config.policy_modes.push_back(PolicyMode::Distill);
                else if (item == "no_distill") config.policy_modes.push_back(PolicyMode::NoDistill);
                else bad_value(source, key, "expected distill or no_distill");
            }
        } else if (key == "out") config.out_path = value;
        else if (key == "trace") config.trace_path = value;
        else throw std::runtime_error(source + ":" + std::to_string(lineno) +
                                      ": unknown key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path) {
    RunConfig config;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        apply_config_text(config, in, path);
    }
    config.validate();
    return config;
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
    if (overrides.f_th) config.model.f_th = *overrides.f_th;
    if (overrides.no_distill && *overrides.no_distill) {
        config.model.allow_distill = false;
        config.policy_modes = {PolicyMode::NoDistill};
    }
    if (overrides.seed) config.sim.seed = *overrides.seed;
    if (overrides.steps) config.sim.steps = *overrides.steps;
    if (overrides.mode) config.sim.mode = *overrides.mode;
    if (overrides.out_path) config.out_path = *overrides.out_path;
    if (overrides.trace_path) config.trace_path = *overrides.trace_path;
    config.validate();
}

}  // namespace qswitch
