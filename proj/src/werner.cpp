#include "qswitch/werner.hpp"

#include <string>

namespace qswitch {

namespace {

void check_unit_interval(Fidelity f, const char* name) {
    if (!(f >= 0.0 && f <= 1.0))
        throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

DecayModel DecayModel::from_cutoff(Fidelity f_star, int m_star) {
    return DecayModel{decoherence_rate(f_star, m_star), m_star, f_star};
}

double decoherence_rate(Fidelity f_star, int m_star) {
    if (!(f_star > 0.0 && f_star < 1.0))
        throw std::domain_error("f_star must lie in (0, 1)");
    if (m_star < 1)
        throw std::domain_error("m_star must be at least 1");
    return -std::log(f_star) / m_star;
}

Fidelity fidelity_at_age(int m, const DecayModel& model) {
    if (m < 0 || m > model.m_star)
        throw std::domain_error("age must lie in [0, m_star]");
    return std::exp(-model.alpha * m);
}

Fidelity swap_fidelity(Fidelity f1, Fidelity f2) {
    check_unit_interval(f1, "f1");
    check_unit_interval(f2, "f2");
    return ((4.0 * f1 - 1.0) * (4.0 * f2 - 1.0) / 3.0 + 1.0) / 4.0;
}

double distill_success_prob(Fidelity f1, Fidelity f2) {
    check_unit_interval(f1, "f1");
    check_unit_interval(f2, "f2");
    return 8.0 / 9.0 * f1 * f2 - 2.0 / 9.0 * (f1 + f2) + 5.0 / 9.0;
}

Fidelity distill_output_fidelity(Fidelity f1, Fidelity f2) {
    double p = distill_success_prob(f1, f2);
    // p >= 1/2 on the physical domain; guard the division regardless.
    if (p <= 0.0)
        throw std::domain_error("distillation success probability is zero");
    return (10.0 / 9.0 * f1 * f2 - 1.0 / 9.0 * (f1 + f2) + 1.0 / 9.0) / p;
}

int nearest_age(Fidelity f, const DecayModel& model) {
    check_unit_interval(f, "f");
    int best = 0;
    double best_dist = std::abs(f - fidelity_at_age(0, model));
    for (int m = 1; m <= model.m_star; ++m) {
        // Strict comparison keeps the smaller age on ties.
        double d = std::abs(f - fidelity_at_age(m, model));
        if (d < best_dist) {
            best_dist = d;
            best = m;
        }
    }
    return best;
}

}  // namespace qswitch
