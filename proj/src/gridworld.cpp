#include "chirp/gridworld.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace chirp {

int GridMdp::max_goal_distance() const {
    const int lo = 1;
    const int hi = grid_size - 2;
    const int dx = std::max(goal.x - lo, hi - goal.x);
    const int dy = std::max(goal.y - lo, hi - goal.y);
    return dx + dy;
}

std::string GridMdp::id() const {
    return "g" + std::to_string(goal.x) + "-" + std::to_string(goal.y) + "_s" +
           std::to_string(start.x) + "-" + std::to_string(start.y);
}

Cell apply_move(Cell state, Action action, int grid_size) {
    Cell next = state;
    switch (action) {
    case Action::North: next.y += 1; break;
    case Action::South: next.y -= 1; break;
    case Action::East: next.x += 1; break;
    case Action::West: next.x -= 1; break;
    }
    const bool wall = next.x < 1 || next.x > grid_size - 2 || next.y < 1 || next.y > grid_size - 2;
    return wall ? state : next;
}

GridMdp make_variant(Cell goal, Cell start, double slip_prob) {
    GridMdp mdp;
    mdp.goal = goal;
    mdp.start = start;
    mdp.slip_prob = slip_prob;
    if (!mdp.passable(goal))
        throw ValidationError("make_variant: goal (" + std::to_string(goal.x) + "," +
                              std::to_string(goal.y) + ") is a wall cell");
    if (!mdp.passable(start))
        throw ValidationError("make_variant: start (" + std::to_string(start.x) + "," +
                              std::to_string(start.y) + ") is a wall cell");
    if (goal == start) throw ValidationError("make_variant: start equals goal");
    if (slip_prob < 0.0 || slip_prob > 1.0)
        throw ValidationError("make_variant: slip_prob outside [0,1]");
    mdp.c_scale = 1.0 / std::max(1, manhattan(start, goal));
    return mdp;
}

Transition step(const GridMdp& mdp, Cell state, Action action, Rng& rng) {
    if (!mdp.passable(state)) throw ValidationError("step: state is a wall cell");
    if (state == mdp.goal) return Transition{state, action, state, 0.0, true};

    Action executed = action;
    if (mdp.slip_prob > 0.0 && rng.uniform_real() < mdp.slip_prob)
        executed = kAllActions[rng.bounded(kActionCount)];

    const Cell next = apply_move(state, executed, mdp.grid_size);
    return Transition{state, action, next, mdp.reward_to(next), next == mdp.goal};
}

Transition step(const GridMdp& mdp, Cell state, Action action, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return step(mdp, state, action, rng);
}

std::vector<std::pair<Cell, Action>> enumerate_state_actions(const GridMdp& mdp) {
    std::vector<std::pair<Cell, Action>> out;
    out.reserve(static_cast<std::size_t>(mdp.passable_count()) * kActionCount);
    for (int y = 1; y <= mdp.grid_size - 2; ++y)
        for (int x = 1; x <= mdp.grid_size - 2; ++x)
            for (Action a : kAllActions) out.emplace_back(Cell{x, y}, a);
    return out;
}

Cell reset_to(const GridMdp& mdp, Cell state) {
    if (!mdp.passable(state)) throw ValidationError("reset_to: target is a wall cell");
    return state;
}

std::vector<GridMdp> load_variants_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open variants file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw ValidationError("variants file must be a JSON array: " + path);
    std::vector<GridMdp> out;
    out.reserve(doc.size());
    for (const auto& item : doc) {
        const auto& g = item.at("goal");
        const auto& s = item.at("start");
        const double slip = item.value("slip", 0.0);
        out.push_back(make_variant(Cell{g.at(0).get<int>(), g.at(1).get<int>()},
                                   Cell{s.at(0).get<int>(), s.at(1).get<int>()}, slip));
    }
    return out;
}

void save_variants_json(const std::string& path, const std::vector<GridMdp>& variants) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const GridMdp& m : variants) {
        nlohmann::ordered_json item;
        item["goal"] = {m.goal.x, m.goal.y};
        item["start"] = {m.start.x, m.start.y};
        item["slip"] = m.slip_prob;
        doc.push_back(std::move(item));
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write variants file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace chirp
