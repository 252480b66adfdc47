#include "qswitch/model.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qswitch {

namespace {

// Ordered accumulator for (state, probability) branches; merges duplicates
// and yields entries sorted by canonical state order.
struct BranchAccumulator {
    std::map<SwitchState, double, decltype(&state_less)> mass{&state_less};

    void add(SwitchState state, double prob) {
        if (prob <= 0.0) return;
        mass[std::move(state)] += prob;
    }

    std::vector<TransitionEntry> entries() const {
        std::vector<TransitionEntry> out;
        out.reserve(mass.size());
        for (const auto& [state, prob] : mass) out.push_back({state, prob});
        return out;
    }
};

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

// All multisets of size 0..capacity over {0,...,m_star}, smallest size
// first, lexicographic within a size.
std::vector<ClientBuffer> enumerate_buffers(int m_star, int capacity) {
    std::vector<ClientBuffer> out;
    std::vector<int> ages;
    auto grow = [&](auto&& self, int min_age) -> void {
        out.push_back(ClientBuffer{ages});
        if (static_cast<int>(ages.size()) == capacity) return;
        for (int age = min_age; age <= m_star; ++age) {
            ages.push_back(age);
            self(self, age);
            ages.pop_back();
        }
    };
    grow(grow, 0);
    std::sort(out.begin(), out.end(), &buffer_less);
    return out;
}

const ClientBuffer& buffer_of(const SwitchState& state, Client c) {
    return c == Client::A ? state.a : state.b;
}

ClientBuffer& buffer_of(SwitchState& state, Client c) {
    return c == Client::A ? state.a : state.b;
}

// Admit one fresh pair, evicting the oldest stored pair if the buffer is
// already at capacity.
void admit_fresh(ClientBuffer& buffer, int capacity) {
    if (buffer.size() == capacity) buffer.remove_one(buffer.oldest());
    buffer.insert(0);
}

}  // namespace

// --- ModelParams -------------------------------------------------------

void ModelParams::validate() const {
    check_probability(lambda1, "lambda1");
    check_probability(lambda2, "lambda2");
    if (m_star < 1) throw std::domain_error("m_star must be at least 1");
    if (!(f_star > 0.0 && f_star < 1.0)) throw std::domain_error("f_star must lie in (0, 1)");
    if (capacity < 1) throw std::domain_error("capacity must be at least 1");
    check_probability(f_th, "f_th");
    if (q != 1.0) throw std::domain_error("q is fixed to 1");
}

// --- ClientBuffer ------------------------------------------------------

ClientBuffer::ClientBuffer(std::vector<int> ages) : ages_(std::move(ages)) {
    std::sort(ages_.begin(), ages_.end());
    if (!ages_.empty() && ages_.front() < 0)
        throw std::domain_error("pair ages must be non-negative");
}

bool ClientBuffer::contains(int age) const {
    return std::binary_search(ages_.begin(), ages_.end(), age);
}

int ClientBuffer::count(int age) const {
    auto [lo, hi] = std::equal_range(ages_.begin(), ages_.end(), age);
    return static_cast<int>(hi - lo);
}

int ClientBuffer::oldest() const {
    if (ages_.empty()) throw std::logic_error("oldest() on an empty buffer");
    return ages_.back();
}

void ClientBuffer::insert(int age) {
    ages_.insert(std::upper_bound(ages_.begin(), ages_.end(), age), age);
}

void ClientBuffer::remove_one(int age) {
    auto it = std::lower_bound(ages_.begin(), ages_.end(), age);
    if (it == ages_.end() || *it != age)
        throw std::invalid_argument("no stored pair of age " + std::to_string(age));
    ages_.erase(it);
}

bool buffer_less(const ClientBuffer& lhs, const ClientBuffer& rhs) {
    if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
    return lhs.ages() < rhs.ages();
}

bool state_less(const SwitchState& lhs, const SwitchState& rhs) {
    if (lhs.a != rhs.a) return buffer_less(lhs.a, rhs.a);
    return buffer_less(lhs.b, rhs.b);
}

// --- Action ------------------------------------------------------------

Action Action::swap(int age_a, int age_b) {
    return Action{ActionKind::Swap, Client::A, age_a, age_b};
}

Action Action::distill(Client c, int age_x, int age_y) {
    if (age_x > age_y) std::swap(age_x, age_y);
    return Action{ActionKind::Distill, c, age_x, age_y};
}

bool action_less(const Action& lhs, const Action& rhs) {
    if (lhs.kind != rhs.kind) return lhs.kind < rhs.kind;
    if (lhs.kind == ActionKind::Distill && lhs.client != rhs.client)
        return lhs.client < rhs.client;
    if (lhs.x != rhs.x) return lhs.x < rhs.x;
    return lhs.y < rhs.y;
}

// --- operations --------------------------------------------------------

std::vector<SwitchState> enumerate_states(const ModelParams& params) {
    // Needs only the age range and capacity, so m_star = 0 is allowed here
    // even though the full model requires m_star >= 1 for the decay law.
    if (params.m_star < 0) throw std::domain_error("m_star must be non-negative");
    if (params.capacity < 1) throw std::domain_error("capacity must be at least 1");
    auto buffers = enumerate_buffers(params.m_star, params.capacity);
    std::vector<SwitchState> out;
    out.reserve(buffers.size() * buffers.size());
    for (const auto& a : buffers)
        for (const auto& b : buffers) out.push_back({a, b});
    return out;
}

std::vector<Action> available_actions(const SwitchState& state, const ModelParams& params) {
    std::vector<Action> out;
    out.push_back(Action::wait());

    std::vector<int> ages_a = state.a.ages();
    std::vector<int> ages_b = state.b.ages();
    ages_a.erase(std::unique(ages_a.begin(), ages_a.end()), ages_a.end());
    ages_b.erase(std::unique(ages_b.begin(), ages_b.end()), ages_b.end());

    for (int age_a : ages_a)
        for (int age_b : ages_b) out.push_back(Action::swap(age_a, age_b));

    if (params.allow_distill) {
        for (Client c : {Client::A, Client::B}) {
            const ClientBuffer& buffer = buffer_of(state, c);
            if (buffer.size() < 2) continue;
            const auto& distinct = (c == Client::A) ? ages_a : ages_b;
            for (size_t i = 0; i < distinct.size(); ++i) {
                if (buffer.count(distinct[i]) >= 2)
                    out.push_back(Action::distill(c, distinct[i], distinct[i]));
                for (size_t j = i + 1; j < distinct.size(); ++j)
                    out.push_back(Action::distill(c, distinct[i], distinct[j]));
            }
        }
    }
    std::sort(out.begin(), out.end(), &action_less);
    return out;
}

bool is_available(const SwitchState& state, const Action& action, const ModelParams& params) {
    switch (action.kind) {
        case ActionKind::Wait:
            return true;
        case ActionKind::Swap:
            return state.a.contains(action.x) && state.b.contains(action.y);
        case ActionKind::Distill: {
            if (!params.allow_distill) return false;
            const ClientBuffer& buffer = buffer_of(state, action.client);
            if (action.x == action.y) return buffer.count(action.x) >= 2;
            return buffer.contains(action.x) && buffer.contains(action.y);
        }
    }
    return false;
}

int distilled_label(Fidelity output, const DecayModel& decay) {
    return std::max(1, nearest_age(output, decay));
}

double reward(const SwitchState& state, const Action& action, const ModelParams& params) {
    if (!is_available(state, action, params))
        throw std::invalid_argument("action " + to_string(action) + " not available in " +
                                    to_string(state));
    if (action.kind != ActionKind::Swap) return 0.0;
    DecayModel decay = params.decay();
    Fidelity out = swap_fidelity(fidelity_at_age(action.x, decay),
                                 fidelity_at_age(action.y, decay));
    return out >= params.f_th ? params.q : 0.0;
}

std::vector<TransitionEntry> apply_action(const SwitchState& state, const Action& action,
                                          const ModelParams& params) {
    if (!is_available(state, action, params))
        throw std::invalid_argument("action " + to_string(action) + " not available in " +
                                    to_string(state));
    switch (action.kind) {
        case ActionKind::Wait:
            return {{state, 1.0}};
        case ActionKind::Swap: {
            SwitchState next = state;
            next.a.remove_one(action.x);
            next.b.remove_one(action.y);
            return {{std::move(next), 1.0}};
        }
        case ActionKind::Distill: {
            DecayModel decay = params.decay();
            Fidelity f1 = fidelity_at_age(action.x, decay);
            Fidelity f2 = fidelity_at_age(action.y, decay);
            double p = distill_success_prob(f1, f2);

            SwitchState failed = state;
            ClientBuffer& lost = buffer_of(failed, action.client);
            lost.remove_one(action.x);
            lost.remove_one(action.y);

            SwitchState succeeded = failed;
            buffer_of(succeeded, action.client)
                .insert(distilled_label(distill_output_fidelity(f1, f2), decay));

            BranchAccumulator acc;
            acc.add(std::move(succeeded), p);
            acc.add(std::move(failed), 1.0 - p);
            return acc.entries();
        }
    }
    throw std::logic_error("unreachable action kind");
}

SwitchState age_and_discard(const SwitchState& state, const ModelParams& params) {
    auto age_buffer = [&](const ClientBuffer& buffer) {
        std::vector<int> kept;
        for (int age : buffer.ages())
            if (age + 1 <= params.m_star) kept.push_back(age + 1);
        return ClientBuffer{std::move(kept)};
    };
    return {age_buffer(state.a), age_buffer(state.b)};
}

std::vector<TransitionEntry> arrival_distribution(const SwitchState& state,
                                                  const ModelParams& params) {
    BranchAccumulator acc;
    for (bool arrive_a : {false, true}) {
        double pa = arrive_a ? params.lambda1 : 1.0 - params.lambda1;
        if (pa <= 0.0) continue;
        for (bool arrive_b : {false, true}) {
            double pb = arrive_b ? params.lambda2 : 1.0 - params.lambda2;
            if (pb <= 0.0) continue;
            SwitchState next = state;
            if (arrive_a) admit_fresh(next.a, params.capacity);
            if (arrive_b) admit_fresh(next.b, params.capacity);
            acc.add(std::move(next), pa * pb);
        }
    }
    return acc.entries();
}

std::vector<TransitionEntry> transition(const SwitchState& state, const Action& action,
                                        const ModelParams& params) {
    // Distillation spans the remainder of the step: the output materializes
    // at the step boundary and enters the next decision epoch at its mapped
    // age label, skipping the same-step increment applied to pairs that sat
    // in memory. The label is floored at 1 because only a pristine arrival
    // is ever age 0; a distilled pair has existed for a full step. This is
    // what lets the protocol preserve an aging link's usefulness across
    // steps without ever substituting for a fresh link.
    if (action.kind == ActionKind::Distill) {
        if (!is_available(state, action, params))
            throw std::invalid_argument("action " + to_string(action) + " not available in " +
                                        to_string(state));
        DecayModel decay = params.decay();
        Fidelity f1 = fidelity_at_age(action.x, decay);
        Fidelity f2 = fidelity_at_age(action.y, decay);
        double p = distill_success_prob(f1, f2);

        SwitchState stripped = state;
        ClientBuffer& source = buffer_of(stripped, action.client);
        source.remove_one(action.x);
        source.remove_one(action.y);
        SwitchState aged = age_and_discard(stripped, params);

        SwitchState succeeded = aged;
        buffer_of(succeeded, action.client)
            .insert(distilled_label(distill_output_fidelity(f1, f2), decay));

        BranchAccumulator acc;
        if (p > 0.0)
            for (auto& arrival : arrival_distribution(succeeded, params))
                acc.add(std::move(arrival.next), p * arrival.prob);
        if (p < 1.0)
            for (auto& arrival : arrival_distribution(aged, params))
                acc.add(std::move(arrival.next), (1.0 - p) * arrival.prob);
        return acc.entries();
    }

    BranchAccumulator acc;
    for (const auto& after_action : apply_action(state, action, params)) {
        SwitchState aged = age_and_discard(after_action.next, params);
        for (auto& arrival : arrival_distribution(aged, params))
            acc.add(std::move(arrival.next), after_action.prob * arrival.prob);
    }
    return acc.entries();
}

// --- SwitchModel -------------------------------------------------------

SwitchModel::SwitchModel(ModelParams params)
    : params_(std::move(params)), decay_(DecayModel{}) {
    params_.validate();
    decay_ = params_.decay();

    auto buffers = enumerate_buffers(params_.m_star, params_.capacity);
    buffers_per_client_ = static_cast<int>(buffers.size());

    // Packed base-(m_star + 2) key per buffer; bail out if a key cannot fit
    // in 64 bits (capacity * log2(m_star + 2) must stay below 64).
    double key_bits = params_.capacity * std::log2(static_cast<double>(params_.m_star) + 2.0);
    if (key_bits >= 63.0)
        throw std::domain_error("state space too large to index (reduce capacity or m_star)");

    rank_by_key_.reserve(buffers.size());
    for (int r = 0; r < buffers_per_client_; ++r)
        rank_by_key_.emplace_back(buffer_key(buffers[r].ages()), r);
    std::sort(rank_by_key_.begin(), rank_by_key_.end());

    states_ = enumerate_states(params_);
    actions_.reserve(states_.size());
    mdp_.choices.reserve(states_.size());
    for (const auto& state : states_) {
        actions_.push_back(available_actions(state, params_));
        std::vector<MdpChoice> choices;
        choices.reserve(actions_.back().size());
        for (const auto& action : actions_.back()) {
            MdpChoice choice;
            choice.reward = reward(state, action, params_);
            for (const auto& entry : transition(state, action, params_))
                choice.outcomes.push_back({state_index(entry.next), entry.prob});
            choices.push_back(std::move(choice));
        }
        mdp_.choices.push_back(std::move(choices));
    }
}

std::uint64_t SwitchModel::buffer_key(std::span<const int> ages) const {
    std::uint64_t base = static_cast<std::uint64_t>(params_.m_star) + 2;
    std::uint64_t key = 0;
    for (int age : ages) key = key * base + static_cast<std::uint64_t>(age) + 1;
    return key;
}

int SwitchModel::buffer_rank(std::span<const int> ages) const {
    // Reject out-of-range inputs before packing: an age beyond m_star would
    // alias a different buffer's key.
    if (static_cast<int>(ages.size()) > params_.capacity) return -1;
    for (int age : ages)
        if (age < 0 || age > params_.m_star) return -1;
    std::uint64_t key = buffer_key(ages);
    auto it = std::lower_bound(rank_by_key_.begin(), rank_by_key_.end(),
                               std::make_pair(key, 0));
    if (it == rank_by_key_.end() || it->first != key) return -1;
    return it->second;
}

int SwitchModel::state_index(std::span<const int> ages_a, std::span<const int> ages_b) const {
    int ra = buffer_rank(ages_a);
    int rb = buffer_rank(ages_b);
    if (ra < 0 || rb < 0)
        throw std::invalid_argument(
            "state " + to_string(SwitchState{ClientBuffer{{ages_a.begin(), ages_a.end()}},
                                             ClientBuffer{{ages_b.begin(), ages_b.end()}}}) +
            " is not in the model's state space");
    return ra * buffers_per_client_ + rb;
}

int SwitchModel::state_index(const SwitchState& state) const {
    return state_index(state.a.ages(), state.b.ages());
}

// --- formatting --------------------------------------------------------

std::string to_string(const ClientBuffer& buffer) {
    std::string out = "[";
    for (size_t i = 0; i < buffer.ages().size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(buffer.ages()[i]);
    }
    return out + "]";
}

std::string to_string(const SwitchState& state) {
    return "A=" + to_string(state.a) + " B=" + to_string(state.b);
}

std::string to_string(const Action& action) {
    switch (action.kind) {
        case ActionKind::Wait:
            return "WAIT";
        case ActionKind::Swap:
            return "SWAP(" + std::to_string(action.x) + "," + std::to_string(action.y) + ")";
        case ActionKind::Distill:
            return std::string("DISTILL(") + (action.client == Client::A ? "A" : "B") + "," +
                   std::to_string(action.x) + "," + std::to_string(action.y) + ")";
    }
    return "?";
}

void dump_model(const SwitchModel& model, std::ostream& out) {
    const ModelParams& p = model.params();
    char line[160];
    out << "# switch model dump v1\n";
    std::snprintf(line, sizeof line,
                  "# lambda1=%.17g lambda2=%.17g m_star=%d f_star=%.17g capacity=%d "
                  "f_th=%.17g distill=%d\n",
                  p.lambda1, p.lambda2, p.m_star, p.f_star, p.capacity, p.f_th,
                  p.allow_distill ? 1 : 0);
    out << line;
    out << "states " << model.num_states() << "\n";
    for (int s = 0; s < model.num_states(); ++s)
        out << "s " << s << " " << to_string(model.states()[s]) << "\n";
    for (int s = 0; s < model.num_states(); ++s) {
        const auto& actions = model.actions(s);
        for (size_t a = 0; a < actions.size(); ++a) {
            const MdpChoice& choice = model.mdp().choices[s][a];
            std::snprintf(line, sizeof line, "a %d %zu %s r=%.17g\n", s, a,
                          to_string(actions[a]).c_str(), choice.reward);
            out << line;
            for (const auto& t : choice.outcomes) {
                std::snprintf(line, sizeof line, "t %d %zu %d %.17g\n", s, a, t.next, t.prob);
                out << line;
            }
        }
    }
}

}  // namespace qswitch
