#include "chirp/sopr.hpp"

#include <cmath>

namespace chirp {

namespace {
constexpr double kDegenerateDenominator = 1e-9;
}

bool calculability_check(const GridMdp& m_i, const GridMdp& m_j) {
    // The action enum is shared by construction; state containment reduces to
    // the grid sizes matching.
    return m_i.grid_size == m_j.grid_size;
}

SoprResult sopr(const GridMdp& m_i, const GridMdp& m_j) {
    if (!calculability_check(m_i, m_j))
        throw CalculabilityError("sopr: source optimal policy is not executable in the target");

    const TabularPolicy best_j = optimal_policy(m_j, PolicyRole::MaxOptimal);
    const TabularPolicy worst_j = optimal_policy(m_j, PolicyRole::MinOptimal);
    const TabularPolicy best_i = optimal_policy(m_i, PolicyRole::MaxOptimal);

    SoprResult r;
    r.source_mdp = m_i.id();
    r.target_mdp = m_j.id();
    r.target_best = policy_evaluation(best_j, m_j, m_j.start).value;
    r.target_worst = policy_evaluation(worst_j, m_j, m_j.start).value;
    r.crossed = policy_evaluation(best_i, m_j, m_j.start).value;
    r.numerator = r.target_best - r.crossed;
    r.denominator = r.target_best - r.target_worst;
    if (!(r.denominator > kDegenerateDenominator))
        throw NumericalError("sopr: degenerate MDP, all policies have equal value");
    r.value = r.numerator / r.denominator;
    return r;
}

} // namespace chirp
