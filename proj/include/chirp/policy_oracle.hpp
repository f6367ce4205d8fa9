#pragma once

#include <array>
#include <string>
#include <vector>

#include "chirp/gridworld.hpp"

namespace chirp {

enum class PolicyRole { MaxOptimal, MinOptimal, Learned };

/// Per-state action distribution with total support over the passable cells
/// of one grid size. Policies transfer between same-size variants, which is
/// what makes cross-MDP evaluation well defined.
struct TabularPolicy {
    PolicyRole role = PolicyRole::Learned;
    int grid_size = 20;
    std::vector<std::array<double, 4>> action_probs; // indexed by passable cell index

    const std::array<double, 4>& probs_at(const GridMdp& mdp, Cell c) const;
};

struct ValueTable {
    std::vector<double> values; // per passable cell index
};

enum class EvalMethod { ExactDP, MonteCarlo };

struct ReturnEstimate {
    double value = 0.0;
    std::string mdp_id;
    PolicyRole policy_role = PolicyRole::Learned;
    EvalMethod method = EvalMethod::ExactDP;
};

/// Probability-weighted successor list under the slip dynamics; at most four
/// distinct outcomes. The goal state is absorbing and yields nothing.
struct Outcome {
    Cell next;
    double prob;
    double reward;
};
std::array<Outcome, 4> transition_outcomes(const GridMdp& mdp, Cell state, Action action);

/// Bellman optimality (MaxOptimal) or pessimality (MinOptimal) fixed point via
/// synchronous sweeps. Throws NumericalError after max_sweeps without reaching
/// tol in sup norm.
ValueTable value_iteration(const GridMdp& mdp, PolicyRole role, double tol = 1e-10,
                           int max_sweeps = 10'000);

/// Canonical optimal policy: uniform probability over every action whose
/// Q-value is within 1e-9 of the per-state best (worst for MinOptimal).
TabularPolicy optimal_policy(const GridMdp& mdp, PolicyRole role);

/// Exact expected discounted return from `start` under the MDP's dynamics,
/// horizon-truncated backward induction. The policy may come from another
/// same-size variant; a policy that does not cover the state space raises
/// CalculabilityError.
ReturnEstimate policy_evaluation(const TabularPolicy& policy, const GridMdp& mdp, Cell start);

} // namespace chirp
