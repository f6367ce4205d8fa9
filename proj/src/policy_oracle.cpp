#include "chirp/policy_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace chirp {

namespace {
constexpr double kArgmaxTieTol = 1e-9;
}

const std::array<double, 4>& TabularPolicy::probs_at(const GridMdp& mdp, Cell c) const {
    if (grid_size != mdp.grid_size ||
        action_probs.size() != static_cast<std::size_t>(mdp.passable_count()))
        throw CalculabilityError("policy does not cover the target MDP's state space");
    return action_probs[static_cast<std::size_t>(mdp.cell_index(c))];
}

std::array<Outcome, 4> transition_outcomes(const GridMdp& mdp, Cell state, Action action) {
    std::array<Outcome, 4> out{};
    if (state == mdp.goal) {
        for (int e = 0; e < kActionCount; ++e) out[e] = {state, e == 0 ? 1.0 : 0.0, 0.0};
        return out;
    }
    const double slip_share = mdp.slip_prob / kActionCount;
    for (int e = 0; e < kActionCount; ++e) {
        const Cell next = apply_move(state, kAllActions[e], mdp.grid_size);
        double p = slip_share;
        if (kAllActions[e] == action) p += 1.0 - mdp.slip_prob;
        out[e] = {next, p, mdp.reward_to(next)};
    }
    return out;
}

namespace {

double q_value(const GridMdp& mdp, Cell state, Action action, const std::vector<double>& v,
               double discount) {
    if (state == mdp.goal) return 0.0;
    double q = 0.0;
    for (const Outcome& o : transition_outcomes(mdp, state, action)) {
        if (o.prob == 0.0) continue;
        const double tail = (o.next == mdp.goal) ? 0.0 : v[mdp.cell_index(o.next)];
        q += o.prob * (o.reward + discount * tail);
    }
    return q;
}

} // namespace

ValueTable value_iteration(const GridMdp& mdp, PolicyRole role, double tol, int max_sweeps) {
    if (tol <= 0.0) throw ValidationError("value_iteration: tol must be positive");
    if (role == PolicyRole::Learned)
        throw ValidationError("value_iteration: role must be MaxOptimal or MinOptimal");
    const int n = mdp.passable_count();
    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < n; ++s) {
            const Cell cell = mdp.cell_at(s);
            if (cell == mdp.goal) {
                next[s] = 0.0;
                continue;
            }
            double best = q_value(mdp, cell, kAllActions[0], v, mdp.discount);
            for (int a = 1; a < kActionCount; ++a) {
                const double q = q_value(mdp, cell, kAllActions[a], v, mdp.discount);
                best = (role == PolicyRole::MaxOptimal) ? std::max(best, q) : std::min(best, q);
            }
            next[s] = best;
            delta = std::max(delta, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        if (delta < tol) return ValueTable{std::move(v)};
    }
    throw NumericalError("value_iteration: no convergence after " + std::to_string(max_sweeps) +
                         " sweeps");
}

TabularPolicy optimal_policy(const GridMdp& mdp, PolicyRole role) {
    const ValueTable table = value_iteration(mdp, role);
    const int n = mdp.passable_count();
    TabularPolicy policy;
    policy.role = role;
    policy.grid_size = mdp.grid_size;
    policy.action_probs.assign(n, {0.0, 0.0, 0.0, 0.0});
    for (int s = 0; s < n; ++s) {
        const Cell cell = mdp.cell_at(s);
        std::array<double, 4> q{};
        for (int a = 0; a < kActionCount; ++a)
            q[a] = q_value(mdp, cell, kAllActions[a], table.values, mdp.discount);
        const double pivot = (role == PolicyRole::MaxOptimal)
                                 ? *std::max_element(q.begin(), q.end())
                                 : *std::min_element(q.begin(), q.end());
        int support = 0;
        for (int a = 0; a < kActionCount; ++a)
            if (std::abs(q[a] - pivot) <= kArgmaxTieTol) ++support;
        for (int a = 0; a < kActionCount; ++a)
            if (std::abs(q[a] - pivot) <= kArgmaxTieTol)
                policy.action_probs[s][a] = 1.0 / support;
    }
    return policy;
}

ReturnEstimate policy_evaluation(const TabularPolicy& policy, const GridMdp& mdp, Cell start) {
    if (!mdp.passable(start)) throw ValidationError("policy_evaluation: start is a wall cell");
    const int n = mdp.passable_count();
    if (policy.grid_size != mdp.grid_size ||
        policy.action_probs.size() != static_cast<std::size_t>(n))
        throw CalculabilityError("policy_evaluation: policy does not cover the MDP");

    // Backward induction over the episode horizon; the goal row is pinned at 0.
    std::vector<double> v(n, 0.0), prev(n, 0.0);
    for (int t = mdp.horizon - 1; t >= 0; --t) {
        for (int s = 0; s < n; ++s) {
            const Cell cell = mdp.cell_at(s);
            if (cell == mdp.goal) {
                v[s] = 0.0;
                continue;
            }
            const std::array<double, 4>& probs = policy.action_probs[s];
            double acc = 0.0;
            for (int a = 0; a < kActionCount; ++a) {
                if (probs[a] == 0.0) continue;
                for (const Outcome& o : transition_outcomes(mdp, cell, kAllActions[a])) {
                    if (o.prob == 0.0) continue;
                    const double tail = (o.next == mdp.goal) ? 0.0 : prev[mdp.cell_index(o.next)];
                    acc += probs[a] * o.prob * (o.reward + mdp.discount * tail);
                }
            }
            v[s] = acc;
        }
        v.swap(prev);
    }

    ReturnEstimate est;
    est.value = prev[mdp.cell_index(start)];
    est.mdp_id = mdp.id();
    est.policy_role = policy.role;
    est.method = EvalMethod::ExactDP;
    return est;
}

} // namespace chirp
