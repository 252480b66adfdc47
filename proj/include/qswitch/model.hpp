#pragma once

#include "qswitch/finite_mdp.hpp"
#include "qswitch/werner.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qswitch {

// Parameters of the two-client switch model. q is the swap success
// probability; Bell measurements on matter qubits succeed deterministically,
// so it is fixed to one and validate() rejects anything else.
struct ModelParams {
    double lambda1 = 0.7;    // per-step link generation probability, client A
    double lambda2 = 0.7;    // per-step link generation probability, client B
    int m_star = 3;          // cutoff age
    Fidelity f_star = 0.85;  // fidelity at the cutoff age
    int capacity = 3;        // stored pairs per client (L)
    Fidelity f_th = 0.9;     // end-to-end fidelity threshold
    double q = 1.0;          // swap success probability (fixed to 1)
    bool allow_distill = true;

    void validate() const;
    DecayModel decay() const { return DecayModel::from_cutoff(f_star, m_star); }
};

// Ages of the pairs stored on one client link, kept in non-decreasing order
// so that equal multisets compare equal.
class ClientBuffer {
public:
    ClientBuffer() = default;
    explicit ClientBuffer(std::vector<int> ages);

    const std::vector<int>& ages() const { return ages_; }
    int size() const { return static_cast<int>(ages_.size()); }
    bool empty() const { return ages_.empty(); }
    bool contains(int age) const;
    int count(int age) const;
    int oldest() const;  // largest age; buffer must be non-empty

    void insert(int age);      // keeps the sorted order
    void remove_one(int age);  // throws if no pair of that age is stored

    bool operator==(const ClientBuffer&) const = default;

private:
    std::vector<int> ages_;
};

// The decision-epoch state: one buffer per client. Two states are equal iff
// their sorted buffers are equal.
struct SwitchState {
    ClientBuffer a;
    ClientBuffer b;

    bool operator==(const SwitchState&) const = default;
};

// Canonical order: buffers compare by size first, then lexicographically;
// states by the client-A buffer, then client B. enumerate_states() lists
// states in exactly this order.
bool buffer_less(const ClientBuffer& lhs, const ClientBuffer& rhs);
bool state_less(const SwitchState& lhs, const SwitchState& rhs);

enum class Client { A, B };

enum class ActionKind { Wait, Swap, Distill };

// Wait, Swap(age on A, age on B), or Distill(client, age, age). Actions
// reference ages, not pair identities: pairs of equal age are
// indistinguishable, so one action stands for all equivalent choices.
struct Action {
    ActionKind kind = ActionKind::Wait;
    Client client = Client::A;  // Distill only
    int x = -1;                 // Swap: age on A.  Distill: smaller age.
    int y = -1;                 // Swap: age on B.  Distill: larger age.

    static Action wait() { return Action{}; }
    static Action swap(int age_a, int age_b);
    static Action distill(Client c, int age_x, int age_y);

    bool operator==(const Action&) const = default;
};

// Deterministic action order: Wait, then swaps ascending by (age_a, age_b),
// then distills ascending by (client, age_x, age_y).
bool action_less(const Action& lhs, const Action& rhs);

struct TransitionEntry {
    SwitchState next;
    double prob = 0.0;
};

// --- model operations --------------------------------------------------
//
// One time step, seen from a decision epoch (a post-arrival state):
//   1. the chosen action is applied,
//   2. every surviving pair ages by one step; pairs past m_star are dropped,
//   3. link generation is attempted with both clients; the arrivals form the
//      next decision state.
// transition() composes the three stages and merges duplicate targets, with
// one carve-out: a successful distillation completes at the step boundary,
// so its output enters the next decision state at the distilled_label age
// without the same-step increment of stage 2.

// Every canonical state (both buffers holding at most `capacity` ages from
// {0,...,m_star}), in canonical order.
std::vector<SwitchState> enumerate_states(const ModelParams& params);

// Wait, one Swap per distinct cross-client age pair, and (when enabled) one
// Distill per distinct same-client age pair, in the deterministic order.
std::vector<Action> available_actions(const SwitchState& state, const ModelParams& params);

bool is_available(const SwitchState& state, const Action& action, const ModelParams& params);

// q * [swap output fidelity >= f_th] for swaps, zero for Wait and Distill.
double reward(const SwitchState& state, const Action& action, const ModelParams& params);

// Age label assigned to a distilled output of the given fidelity: the
// nearest quantized age, floored at 1. Only a pristine arrival is ever age
// 0; a distilled pair has existed for at least a full step.
int distilled_label(Fidelity output, const DecayModel& decay);

// Distribution over states right after the action, before aging. Distill
// branches into success (both inputs replaced by one pair at the
// distilled_label age) and failure (both inputs lost).
std::vector<TransitionEntry> apply_action(const SwitchState& state, const Action& action,
                                          const ModelParams& params);

// Every age incremented; pairs whose new age exceeds m_star are dropped.
SwitchState age_and_discard(const SwitchState& state, const ModelParams& params);

// Four Bernoulli branches (both / only A / only B / no arrival). A fresh
// pair entering a full buffer evicts the oldest stored pair.
std::vector<TransitionEntry> arrival_distribution(const SwitchState& state,
                                                  const ModelParams& params);

// Full decision-epoch-to-decision-epoch transition law.
std::vector<TransitionEntry> transition(const SwitchState& state, const Action& action,
                                        const ModelParams& params);

// --- precomputed model -------------------------------------------------

// Immutable tables for one parameter set: the canonical state list, the
// per-state action lists, and planner-ready reward/transition tables.
// Construction is a pure function of the parameters; concurrent reads need
// no coordination.
class SwitchModel {
public:
    explicit SwitchModel(ModelParams params);

    const ModelParams& params() const { return params_; }
    const DecayModel& decay() const { return decay_; }

    int num_states() const { return static_cast<int>(states_.size()); }
    const std::vector<SwitchState>& states() const { return states_; }
    const std::vector<Action>& actions(int state) const { return actions_[state]; }

    // Index of a canonical state; throws if the state is not in the space.
    int state_index(const SwitchState& state) const;
    int state_index(std::span<const int> ages_a, std::span<const int> ages_b) const;

    const FiniteMdp& mdp() const { return mdp_; }

private:
    std::uint64_t buffer_key(std::span<const int> ages) const;
    int buffer_rank(std::span<const int> ages) const;  // -1 if unknown

    ModelParams params_;
    DecayModel decay_;
    std::vector<SwitchState> states_;
    std::vector<std::vector<Action>> actions_;
    std::vector<std::pair<std::uint64_t, int>> rank_by_key_;  // sorted by key
    int buffers_per_client_ = 0;
    FiniteMdp mdp_;
};

// Text dump of the complete model (states, actions, rewards, transition
// triples) for debugging and oracle comparison. One record per line:
//   s <state> <A=[..] B=[..]>
//   a <state> <action-idx> <action> r=<reward>
//   t <state> <action-idx> <next-state> <prob>
void dump_model(const SwitchModel& model, std::ostream& out);

std::string to_string(const ClientBuffer& buffer);
std::string to_string(const SwitchState& state);   // "A=[0,1] B=[2]"
std::string to_string(const Action& action);       // "WAIT", "SWAP(0,1)", "DISTILL(A,0,2)"

}  // namespace qswitch
