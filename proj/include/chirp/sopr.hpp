#pragma once

#include <string>

#include "chirp/gridworld.hpp"
#include "chirp/policy_oracle.hpp"

namespace chirp {

/// Scaled optimal policy regret of running the source MDP's optimal policy in
/// the target MDP, normalized by the target's best-worst return gap. All
/// expectation terms are kept for audit.
struct SoprResult {
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    std::string source_mdp;
    std::string target_mdp;
    double target_best = 0.0;       // E[G | M_j, pi+_j]
    double target_worst = 0.0;      // E[G | M_j, pi-_j]
    double crossed = 0.0;           // E[G | M_j, pi+_i]
};

/// True iff the source's optimal policies are executable in every target
/// state: equal grid sizes (state containment) and the shared 4-action set.
bool calculability_check(const GridMdp& m_i, const GridMdp& m_j);

SoprResult sopr(const GridMdp& m_i, const GridMdp& m_j);

} // namespace chirp
