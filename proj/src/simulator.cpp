#include "qswitch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace qswitch {

void SimConfig::validate() const {
    if (steps < 1) throw std::domain_error("steps must be at least 1");
}

MetricsReport compute_metrics(const std::vector<int>& success_times,
                              const std::vector<double>& delivered_fidelities, int steps) {
    if (steps < 1) throw std::domain_error("steps must be at least 1");
    if (success_times.size() != delivered_fidelities.size())
        throw std::invalid_argument("success_times and delivered_fidelities differ in length");
    for (size_t i = 0; i < success_times.size(); ++i) {
        bool in_range = success_times[i] >= 1 && success_times[i] <= steps;
        bool increasing = i == 0 || success_times[i] > success_times[i - 1];
        if (!in_range || !increasing)
            throw std::invalid_argument("success_times must be strictly increasing in [1, steps]");
    }

    MetricsReport report;
    report.success_count = static_cast<int>(success_times.size());
    report.success_times = success_times;
    report.throughput = static_cast<double>(report.success_count) / steps;
    if (report.success_count > 0) {
        double sum = 0.0;
        for (double f : delivered_fidelities) sum += f;
        report.avg_fidelity = sum / report.success_count;
    }
    if (report.success_count >= 2) {
        const size_t gaps = success_times.size() - 1;
        double mean = 0.0;
        for (size_t i = 0; i < gaps; ++i) mean += success_times[i + 1] - success_times[i];
        mean /= gaps;
        double var = 0.0;
        for (size_t i = 0; i < gaps; ++i) {
            double d = (success_times[i + 1] - success_times[i]) - mean;
            var += d * d;
        }
        report.jitter = std::sqrt(var / gaps);  // population standard deviation
    }
    return report;
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
    double total = 0.0;
    for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) total = *it + gamma * total;
    return total;
}

// --- SimEngine ---------------------------------------------------------

SimEngine::SimEngine(const SwitchModel& model, const PolicyVec& policy, std::uint64_t seed,
                     SimMode mode)
    : model_(model), policy_(policy), mode_(mode), rng_(seed) {
    if (static_cast<int>(policy_.size()) != model_.num_states())
        throw std::invalid_argument("policy does not cover the model's state space");
    const DecayModel& decay = model_.decay();
    decay_factor_ = std::exp(-decay.alpha);
    grid_fidelity_.reserve(decay.m_star + 1);
    for (int m = 0; m <= decay.m_star; ++m) grid_fidelity_.push_back(fidelity_at_age(m, decay));
    scratch_a_.reserve(model_.params().capacity);
    scratch_b_.reserve(model_.params().capacity);
}

double SimEngine::uniform() {
    // 53 random bits; bit-stable for a given seed regardless of the
    // standard library's distribution internals.
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

SwitchState SimEngine::quantized_state() const {
    auto labels = [](const std::vector<LivePair>& buffer) {
        std::vector<int> ages;
        ages.reserve(buffer.size());
        for (const LivePair& p : buffer) ages.push_back(p.age);
        return ClientBuffer{std::move(ages)};
    };
    return {labels(a_), labels(b_)};
}

const Action& SimEngine::lookup_action() const {
    scratch_a_.clear();
    scratch_b_.clear();
    for (const LivePair& p : a_) scratch_a_.push_back(p.age);
    for (const LivePair& p : b_) scratch_b_.push_back(p.age);
    int idx = model_.state_index(scratch_a_, scratch_b_);
    int choice = policy_[idx];
    const auto& actions = model_.actions(idx);
    if (choice < 0 || choice >= static_cast<int>(actions.size()))
        throw std::invalid_argument("policy has no valid action for visited state " +
                                    to_string(model_.states()[idx]));
    return actions[choice];
}

LivePair SimEngine::take_pair(std::vector<LivePair>& buffer, int age) {
    for (auto it = buffer.begin(); it != buffer.end(); ++it) {
        if (it->age == age) {
            LivePair taken = *it;
            buffer.erase(it);
            return taken;
        }
    }
    throw std::logic_error("no stored pair with age label " + std::to_string(age));
}

void SimEngine::insert_pair(std::vector<LivePair>& buffer, LivePair pair) {
    // Order: age ascending, exact fidelity descending within an age, so the
    // front-most pair of a label is its best representative.
    auto pos = std::find_if(buffer.begin(), buffer.end(), [&](const LivePair& q) {
        return q.age > pair.age || (q.age == pair.age && q.fidelity < pair.fidelity);
    });
    buffer.insert(pos, pair);
}

void SimEngine::admit_fresh(std::vector<LivePair>& buffer) {
    if (static_cast<int>(buffer.size()) == model_.params().capacity)
        buffer.pop_back();  // evict the oldest, lowest-fidelity pair
    insert_pair(buffer, LivePair{1.0, 0});
}

void SimEngine::age_pairs(std::vector<LivePair>& buffer) {
    std::erase_if(buffer, [&](const LivePair& p) { return p.age + 1 > model_.decay().m_star; });
    for (LivePair& p : buffer) {
        // A pair sitting exactly on the age grid stays on it, so pairs that
        // were never distilled carry fidelity_at_age(label) without
        // accumulating round-off from repeated multiplication.
        p.fidelity = p.fidelity == grid_fidelity_[p.age] ? grid_fidelity_[p.age + 1]
                                                         : p.fidelity * decay_factor_;
        p.age += 1;
    }
    if (mode_ == SimMode::Quantized)
        for (LivePair& p : buffer) p.fidelity = grid_fidelity_[p.age];
}

SimEngine::StepEvents SimEngine::step() {
    const ModelParams& params = model_.params();
    // Fixed draw order per step: arrival A, arrival B, distill outcome.
    const double u_arrival_a = uniform();
    const double u_arrival_b = uniform();

    StepEvents events;
    events.action = lookup_action();
    std::optional<LivePair> distilled;

    switch (events.action.kind) {
        case ActionKind::Wait:
            break;
        case ActionKind::Swap: {
            LivePair pa = take_pair(a_, events.action.x);
            LivePair pb = take_pair(b_, events.action.y);
            double out = swap_fidelity(pa.fidelity, pb.fidelity);
            if (out >= params.f_th) {
                events.success = true;
                events.reward = params.q;
                events.delivered_fidelity = out;
            }
            break;
        }
        case ActionKind::Distill: {
            auto& buffer = events.action.client == Client::A ? a_ : b_;
            LivePair p1 = take_pair(buffer, events.action.x);
            LivePair p2 = take_pair(buffer, events.action.y);
            double p_succ = distill_success_prob(p1.fidelity, p2.fidelity);
            if (uniform() < p_succ) {
                double f = distill_output_fidelity(p1.fidelity, p2.fidelity);
                int label = distilled_label(f, model_.decay());
                // The protocol completes at the step boundary: the output
                // enters the next decision epoch at its mapped label without
                // the same-step decay applied to stored pairs below.
                distilled = LivePair{mode_ == SimMode::Quantized ? grid_fidelity_[label] : f,
                                     label};
            }
            break;
        }
    }

    age_pairs(a_);
    age_pairs(b_);
    if (distilled)
        insert_pair(events.action.client == Client::A ? a_ : b_, *distilled);
    if (u_arrival_a < params.lambda1) admit_fresh(a_);
    if (u_arrival_b < params.lambda2) admit_fresh(b_);
    return events;
}

MetricsReport simulate(const SwitchModel& model, const PolicyVec& policy,
                       const SimConfig& config, std::ostream* trace) {
    config.validate();
    SimEngine engine(model, policy, config.seed, config.mode);
    std::vector<int> success_times;
    std::vector<double> delivered;
    for (int t = 1; t <= config.steps; ++t) {
        std::string state_str;
        if (trace) state_str = to_string(engine.quantized_state());
        auto events = engine.step();
        if (events.success) {
            success_times.push_back(t);
            delivered.push_back(events.delivered_fidelity);
        }
        if (trace) {
            char line[64];
            *trace << "step=" << t << " state=\"" << state_str << "\" action="
                   << to_string(events.action) << " reward=" << events.reward
                   << " success=" << (events.success ? 1 : 0);
            if (events.success) {
                std::snprintf(line, sizeof line, " delivered=%.17g", events.delivered_fidelity);
                *trace << line;
            }
            *trace << "\n";
        }
    }
    return compute_metrics(success_times, delivered, config.steps);
}

}  // namespace qswitch
