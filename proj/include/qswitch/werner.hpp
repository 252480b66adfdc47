#pragma once

#include <cmath>
#include <stdexcept>

namespace qswitch {

// Fidelity of a Werner state with respect to the target Bell state.
// The closed forms below are defined on [0, 1]; the physically meaningful
// domain is [1/4, 1] and the state is entangled for F > 1/2. Swap and
// distillation keep inputs from [1/4, 1] inside [1/4, 1].
using Fidelity = double;

// Exponential memory decay F(m) = exp(-alpha * m) with a hard cutoff at age
// m_star, where F(m_star) = f_star by construction.
struct DecayModel {
    double alpha = 0.0;     // decoherence rate per time step, >= 0
    int m_star = 1;         // cutoff age; pairs older than this are discarded
    Fidelity f_star = 0.5;  // fidelity reached at the cutoff age

    static DecayModel from_cutoff(Fidelity f_star, int m_star);
};

// alpha = -ln(f_star) / m_star. Requires f_star in (0,1) and m_star >= 1.
double decoherence_rate(Fidelity f_star, int m_star);

// F(m) = exp(-alpha * m) for m in [0, m_star]; strictly decreasing in m.
Fidelity fidelity_at_age(int m, const DecayModel& model);

// Output fidelity of the Bell-state measurement connecting two Werner pairs.
Fidelity swap_fidelity(Fidelity f1, Fidelity f2);

// Success probability of the two-to-one distillation protocol; lies in
// [1/2, 1] when both inputs are in [1/4, 1].
double distill_success_prob(Fidelity f1, Fidelity f2);

// Fidelity of the surviving pair after a successful distillation.
// Fixed points at 1/2 and 1; improves equal inputs strictly in between.
Fidelity distill_output_fidelity(Fidelity f1, Fidelity f2);

// Age on the discrete grid {0,...,m_star} whose fidelity is closest to f.
// Ties go to the smaller age (the higher assumed fidelity).
int nearest_age(Fidelity f, const DecayModel& model);

}  // namespace qswitch
