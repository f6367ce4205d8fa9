#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "chirp/errors.hpp"
#include "chirp/rng.hpp"

namespace chirp {

/// Cardinal moves; the integer encoding is stable for serialization.
enum class Action : int { North = 0, South = 1, East = 2, West = 3 };

constexpr std::array<Action, 4> kAllActions = {Action::North, Action::South, Action::East,
                                               Action::West};
constexpr int kActionCount = 4;

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

/// One static SimpleGrid snapshot: a square grid with impassable edge walls,
/// a goal cell, a fixed start cell and a reward of minus the scaled Manhattan
/// distance from the post-move position to the goal. The goal is absorbing.
struct GridMdp {
    Cell goal;
    Cell start;
    int grid_size = 20;
    double slip_prob = 0.0; // chance the chosen action is replaced by a uniform one
    double c_scale = 1.0;
    double discount = 0.95;
    int horizon = 100;

    bool passable(Cell c) const {
        return c.x >= 1 && c.x <= grid_size - 2 && c.y >= 1 && c.y <= grid_size - 2;
    }
    int passable_per_side() const { return grid_size - 2; }
    int passable_count() const { return passable_per_side() * passable_per_side(); }

    /// Row-major index over passable cells; (1,1) -> 0.
    int cell_index(Cell c) const { return (c.y - 1) * passable_per_side() + (c.x - 1); }
    Cell cell_at(int index) const {
        return Cell{index % passable_per_side() + 1, index / passable_per_side() + 1};
    }

    double reward_to(Cell next) const { return -c_scale * manhattan(next, goal); }

    /// Farthest passable cell from the goal, in Manhattan distance.
    int max_goal_distance() const;

    /// Magnitude of the most negative achievable reward; rewards divided by
    /// this span lie in [-1, 0] for every variant.
    double reward_span() const { return c_scale * max_goal_distance(); }

    std::string id() const;
};

struct Transition {
    Cell state;
    Action action;
    Cell next_state;
    double reward = 0.0;
    bool terminal = false;
};

/// Where `action` leads from `state`; moves into walls leave the agent in place.
Cell apply_move(Cell state, Action action, int grid_size);

/// Builds a SimpleGrid variant. The reward scale is 1 / max(1, d0) where d0 is
/// the start-goal Manhattan distance, so the first step is worth about -1 in
/// every variant.
GridMdp make_variant(Cell goal, Cell start, double slip_prob = 0.0);

/// Executes one action under the slip dynamics. Consumes no randomness when
/// slip_prob is zero. Stepping from the goal is a terminal no-op.
Transition step(const GridMdp& mdp, Cell state, Action action, Rng& rng);
Transition step(const GridMdp& mdp, Cell state, Action action, std::uint64_t rng_seed);

/// All passable-cell x action pairs in row-major, action-index order.
std::vector<std::pair<Cell, Action>> enumerate_state_actions(const GridMdp& mdp);

/// Validates a reset target and returns it; callers carry the cursor.
Cell reset_to(const GridMdp& mdp, Cell state);

/// Variant definition files: array of {goal:[x,y], start:[x,y], slip:float}.
std::vector<GridMdp> load_variants_json(const std::string& path);
void save_variants_json(const std::string& path, const std::vector<GridMdp>& variants);

} // namespace chirp
