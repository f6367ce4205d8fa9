#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chirp/gridworld.hpp"
#include "chirp/transport.hpp"

namespace chirp {

enum class SamplingScheme { Random, RewardShaped };

struct McceConfig {
    int population = 64;
    double elite_fraction = 0.125;
    int iterations = 10;
};

struct SamplingConfig {
    SamplingScheme scheme = SamplingScheme::Random;
    int n_s = 15;       // state-action samples
    int n_t = 1;        // transition repetitions per state-action
    std::uint64_t seed = 0;
    std::optional<McceConfig> mcce; // present iff scheme == RewardShaped
};

/// Paired transition outcomes from executing identical state-action pairs in
/// two MDPs. Outcome rows are (x', y', goal_x, goal_y, r); positions are
/// scaled by 1/(grid_size - 1) and the reward by each MDP's achievable range,
/// so every axis lies in a unit interval.
struct EmpiricalTransitionSet {
    std::vector<std::pair<Cell, Action>> state_actions;
    PointCloud outcomes_i;
    PointCloud outcomes_j;
};

struct DistanceMatrix {
    std::vector<std::string> mdp_ids;
    std::vector<std::vector<double>> entries; // symmetric, zero diagonal
    int repeats = 1;

    std::size_t size() const { return entries.size(); }
};

std::vector<std::pair<Cell, Action>> sample_random(const GridMdp& m_i, const GridMdp& m_j,
                                                   const SamplingConfig& cfg);

/// Draws target rewards uniformly over the achievable range of both MDPs and
/// runs a cross-entropy search over state-action pairs for each target,
/// scoring candidates by mean |realized reward - target| across the two MDPs.
std::vector<std::pair<Cell, Action>> sample_reward_shaped(const GridMdp& m_i, const GridMdp& m_j,
                                                          const SamplingConfig& cfg);

EmpiricalTransitionSet build_empirical(const GridMdp& m_i, const GridMdp& m_j,
                                       std::span<const std::pair<Cell, Action>> pairs, int n_t,
                                       std::uint64_t seed);

/// W1 distance over the full state-action enumeration; requires slip-free
/// dynamics in both MDPs.
double chirp_exact(const GridMdp& m_i, const GridMdp& m_j);

double estimate_chirp(const GridMdp& m_i, const GridMdp& m_j, const SamplingConfig& cfg);

/// Median-of-repeats estimates over all unordered pairs. Seeds derive from
/// (min index, max index, base seed, repeat) so the matrix is symmetric and
/// independent of evaluation order; `workers` parallelizes over pairs.
DistanceMatrix distance_matrix(std::span<const GridMdp> mdps, const SamplingConfig& cfg,
                               int repeats, int workers = 1);

/// matrix.csv: header row of ids, then the full matrix with 6 significant digits.
void save_matrix_csv(const std::string& path, const DistanceMatrix& matrix);
DistanceMatrix load_matrix_csv(const std::string& path);

/// Index-parallel map used by the pair-level loops; results land by index so
/// output does not depend on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace chirp
