#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "chirp/gridworld.hpp"

using namespace chirp;

namespace {

// Independent distance check for the c_scale examples.
int manhattan_by_hand(Cell a, Cell b) {
    const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx + dy;
}

} // namespace

TEST_CASE("make_variant sets the reward scale from the start-goal distance") {
    CHECK(manhattan_by_hand({1, 1}, {10, 10}) == 18);
    const GridMdp far = make_variant({10, 10}, {1, 1});
    CHECK(far.c_scale == doctest::Approx(1.0 / 18).epsilon(1e-12));

    const GridMdp near = make_variant({2, 1}, {1, 1});
    CHECK(near.c_scale == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("make_variant rejects invalid placements") {
    CHECK_THROWS_AS(make_variant({0, 5}, {1, 1}), ValidationError); // row 0 is a wall
    CHECK_THROWS_AS(make_variant({5, 19}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(make_variant({3, 3}, {3, 3}), ValidationError);
    CHECK_THROWS_AS(make_variant({3, 3}, {1, 1}, 1.5), ValidationError);
}

TEST_CASE("step blocks moves into walls") {
    const GridMdp mdp = make_variant({10, 10}, {1, 1});
    const Transition t = step(mdp, {1, 1}, Action::West, 7);
    CHECK(t.next_state == (Cell{1, 1}));
    CHECK_FALSE(t.terminal);
    const Transition t2 = step(mdp, {1, 1}, Action::South, 7);
    CHECK(t2.next_state == (Cell{1, 1}));
}

TEST_CASE("reaching the goal terminates with zero reward") {
    const GridMdp mdp = make_variant({5, 5}, {1, 1});
    const Transition t = step(mdp, {4, 5}, Action::East, 0);
    CHECK(t.terminal);
    CHECK(t.reward == 0.0);
    CHECK(t.next_state == mdp.goal);
}

TEST_CASE("slip-free steps ignore the seed") {
    const GridMdp mdp = make_variant({12, 7}, {3, 3});
    for (Action a : kAllActions) {
        const Transition t1 = step(mdp, {8, 8}, a, 1);
        const Transition t2 = step(mdp, {8, 8}, a, 999);
        CHECK(t1.next_state == t2.next_state);
        CHECK(t1.reward == t2.reward);
        CHECK(t1.terminal == t2.terminal);
    }
}

TEST_CASE("slip replaces the action at the configured rate") {
    const GridMdp mdp = make_variant({10, 10}, {1, 1}, 0.5);
    Rng rng(42);
    int moved_north = 0;
    const int trials = 20'000;
    for (int i = 0; i < trials; ++i) {
        const Transition t = step(mdp, {9, 5}, Action::North, rng);
        if (t.next_state == (Cell{9, 6})) ++moved_north;
    }
    // P(north) = (1 - slip) + slip/4 = 0.625
    const double freq = static_cast<double>(moved_north) / trials;
    CHECK(freq == doctest::Approx(0.625).epsilon(0.03));
}

TEST_CASE("enumerate_state_actions is the canonical 1296-pair list") {
    const GridMdp mdp = make_variant({10, 10}, {1, 1});
    const auto pairs = enumerate_state_actions(mdp);
    CHECK(pairs.size() == 1296);
    CHECK(pairs.front().first == (Cell{1, 1}));
    CHECK(pairs.front().second == Action::North);
    CHECK(pairs[1].second == Action::South);
    CHECK(pairs[4].first == (Cell{2, 1}));
    for (const auto& [cell, action] : pairs) {
        CHECK(mdp.passable(cell));
        (void)action;
    }
    std::set<std::pair<int, int>> distinct;
    for (const auto& [cell, action] : pairs)
        distinct.insert({mdp.cell_index(cell), static_cast<int>(action)});
    CHECK(distinct.size() == pairs.size());
}

TEST_CASE("enumeration length scales with the passable area") {
    GridMdp small;
    small.grid_size = 6;
    small.goal = {2, 2};
    small.start = {1, 1};
    CHECK(enumerate_state_actions(small).size() == 4u * 4u * 4u);
}

TEST_CASE("reset_to validates the target cell") {
    const GridMdp mdp = make_variant({10, 10}, {1, 1});
    CHECK(reset_to(mdp, {5, 5}) == (Cell{5, 5}));
    CHECK_THROWS_AS(reset_to(mdp, {0, 0}), ValidationError);

    // Absorbing-goal convention: stepping from the goal is a terminal no-op.
    const Cell at_goal = reset_to(mdp, mdp.goal);
    const Transition t = step(mdp, at_goal, Action::North, 3);
    CHECK(t.terminal);
    CHECK(t.reward == 0.0);
    CHECK(t.next_state == mdp.goal);
}

TEST_CASE("rewards stay within the scaled distance bounds") {
    const GridMdp mdp = make_variant({15, 3}, {2, 9}, 0.3);
    Rng rng(7);
    const double lower = -mdp.c_scale * 2.0 * (mdp.grid_size - 2);
    for (int i = 0; i < 2000; ++i) {
        const Cell cell{rng.uniform_int(1, 18), rng.uniform_int(1, 18)};
        const Transition t = step(mdp, cell, kAllActions[rng.bounded(4)], rng);
        CHECK(t.reward <= 0.0);
        CHECK(t.reward >= lower);
        CHECK(manhattan(t.state, t.next_state) <= 1);
        CHECK((t.reward == 0.0) == (t.next_state == mdp.goal));
    }
}

TEST_CASE("variant files round-trip with canonical field order") {
    const auto dir = std::filesystem::temp_directory_path() / "chirp_gridworld_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "variants.json").string();

    std::vector<GridMdp> variants = {make_variant({10, 10}, {1, 1}),
                                     make_variant({4, 17}, {9, 2}, 0.25)};
    save_variants_json(path, variants);
    const auto loaded = load_variants_json(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].goal == variants[0].goal);
    CHECK(loaded[0].start == variants[0].start);
    CHECK(loaded[1].slip_prob == variants[1].slip_prob);
    CHECK(loaded[1].c_scale == variants[1].c_scale);

    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"goal\"") < text.find("\"start\""));
    CHECK(text.find("\"start\"") < text.find("\"slip\""));
    std::filesystem::remove_all(dir);
}
