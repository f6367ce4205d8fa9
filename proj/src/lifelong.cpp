#include "chirp/lifelong.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chirp/clustering.hpp"

namespace chirp {

int QPolicy::greedy_action(int cell_index) const {
    const auto& row = q[static_cast<std::size_t>(cell_index)];
    int best = 0;
    for (int a = 1; a < kActionCount; ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

LprBandit::LprBandit(int n_tasks, int n_arms, double epsilon)
    : values_(static_cast<std::size_t>(n_tasks), std::vector<double>(n_arms, 0.0)),
      counts_(static_cast<std::size_t>(n_tasks), std::vector<long>(n_arms, 0)),
      epsilon_(epsilon) {
    if (n_tasks < 1 || n_arms < 1) throw ValidationError("LprBandit: need tasks and arms");
}

int LprBandit::select(int task, Rng& rng) const {
    const auto& vals = values_[static_cast<std::size_t>(task)];
    if (vals.size() == 1) return 0;
    if (epsilon_ > 0.0 && rng.uniform_real() < epsilon_)
        return static_cast<int>(rng.bounded(vals.size()));
    int best = 0;
    for (std::size_t a = 1; a < vals.size(); ++a)
        if (vals[a] > vals[best]) best = static_cast<int>(a);
    return best;
}

void LprBandit::update(int task, int arm, double reward) {
    long& count = counts_[static_cast<std::size_t>(task)][static_cast<std::size_t>(arm)];
    double& value = values_[static_cast<std::size_t>(task)][static_cast<std::size_t>(arm)];
    count += 1;
    value += (reward - value) / static_cast<double>(count);
}

void LprBandit::warm_start(const std::vector<std::vector<double>>& values,
                           const std::vector<std::vector<long>>& counts) {
    if (values.size() != values_.size() || counts.size() != counts_.size())
        throw ValidationError("LprBandit::warm_start: shape mismatch");
    values_ = values;
    counts_ = counts;
}

std::vector<int> cpr_policy_map(const DistanceMatrix& d, int k, std::uint64_t seed) {
    const ClusterAssignment assignment = k_medoids(d, k, seed);
    std::vector<int> map(assignment.labels.size(), -1);
    for (std::size_t m = 0; m < assignment.labels.size(); ++m) {
        const auto it = std::lower_bound(assignment.medoids.begin(), assignment.medoids.end(),
                                         assignment.labels[m]);
        map[m] = static_cast<int>(it - assignment.medoids.begin());
    }
    return map;
}

std::pair<bool, double> q_learning_episode(QPolicy& policy, const GridMdp& mdp, int horizon,
                                           Rng& rng) {
    if (policy.grid_size != mdp.grid_size)
        throw ValidationError("q_learning_episode: policy grid size does not match the task");
    Cell state = mdp.start;
    bool success = false;
    double ret = 0.0;
    double discount_pow = 1.0;
    for (int t = 0; t < horizon; ++t) {
        const int s = mdp.cell_index(state);
        int a = policy.greedy_action(s);
        if (policy.epsilon > 0.0 && rng.uniform_real() < policy.epsilon)
            a = static_cast<int>(rng.bounded(kActionCount));

        const Transition tr = step(mdp, state, kAllActions[a], rng);
        ret += discount_pow * tr.reward;
        discount_pow *= policy.discount;

        double target = tr.reward;
        if (!tr.terminal) {
            const auto& next_row = policy.q[static_cast<std::size_t>(mdp.cell_index(tr.next_state))];
            target += policy.discount * *std::max_element(next_row.begin(), next_row.end());
        }
        double& qsa = policy.q[static_cast<std::size_t>(s)][a];
        qsa += policy.alpha * (target - qsa);

        if (tr.terminal) {
            success = true;
            break;
        }
        state = tr.next_state;
    }
    policy.epsilon = std::max(policy.epsilon_floor, policy.epsilon * policy.epsilon_decay);
    return {success, ret};
}

RunLog run_scenario(const Scenario& scenario, const ReuseStrategy& strategy, std::uint64_t seed) {
    const int n_tasks = static_cast<int>(scenario.tasks.size());
    if (n_tasks < 2) throw ValidationError("run_scenario: need at least two tasks");
    if (scenario.change_prob < 0.0 || scenario.change_prob > 1.0)
        throw ValidationError("run_scenario: change_prob outside [0,1]");
    if (strategy.policy_count < 1 || strategy.policy_count > n_tasks)
        throw ValidationError("run_scenario: policy count must satisfy 1 <= k <= task count");
    if (strategy.kind == StrategyKind::Cpr) {
        if (static_cast<int>(strategy.task_to_policy.size()) != n_tasks)
            throw ValidationError("run_scenario: CPR map must cover every task");
        for (int p : strategy.task_to_policy)
            if (p < 0 || p >= strategy.policy_count)
                throw ValidationError("run_scenario: CPR map entry out of range");
    }

    const int grid_size = scenario.tasks.front().grid_size;
    std::vector<QPolicy> policies;
    if (strategy.warm_start && !strategy.warm_start->policies.empty()) {
        policies = strategy.warm_start->policies;
        if (static_cast<int>(policies.size()) != strategy.policy_count)
            throw ValidationError("run_scenario: warm-start policy count mismatch");
    } else {
        policies.assign(static_cast<std::size_t>(strategy.policy_count), QPolicy(grid_size));
    }

    LprBandit bandit(n_tasks, strategy.policy_count, strategy.bandit_epsilon);
    if (strategy.warm_start && !strategy.warm_start->bandit_values.empty())
        bandit.warm_start(strategy.warm_start->bandit_values, strategy.warm_start->bandit_counts);

    Rng rng(derive_seed({seed, 0x11FE}));
    RunLog log;
    log.seed = seed;
    log.kind = strategy.kind;
    log.records.reserve(static_cast<std::size_t>(scenario.total_episodes));

    int task = 0;
    for (int episode = 0; episode < scenario.total_episodes; ++episode) {
        int policy_id = 0;
        switch (strategy.kind) {
        case StrategyKind::Cpr: policy_id = strategy.task_to_policy[static_cast<std::size_t>(task)]; break;
        case StrategyKind::Lpr: policy_id = bandit.select(task, rng); break;
        case StrategyKind::Single: policy_id = 0; break;
        }

        const auto [success, ret] = q_learning_episode(
            policies[static_cast<std::size_t>(policy_id)],
            scenario.tasks[static_cast<std::size_t>(task)], scenario.horizon, rng);
        if (strategy.kind == StrategyKind::Lpr) bandit.update(task, policy_id, ret);

        log.records.push_back(EpisodeRecord{episode, task, policy_id, success, ret});

        if (scenario.change_prob > 0.0 && rng.uniform_real() < scenario.change_prob) {
            // Uniform among the other tasks.
            const int offset = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_tasks - 1)));
            task = (task + offset) % n_tasks;
        }
    }
    return log;
}

SuccessReport evaluate_success(const RunLog& log, std::size_t window) {
    if (window == 0 || window > log.records.size())
        throw ValidationError("evaluate_success: window must be in [1, episode count]");
    SuccessReport report;
    report.window = window;
    std::map<int, std::pair<std::size_t, std::size_t>> per_task; // successes, count
    for (std::size_t i = log.records.size() - window; i < log.records.size(); ++i) {
        const EpisodeRecord& r = log.records[i];
        report.overall.episodes += 1;
        per_task[r.task_id].second += 1;
        if (r.success) {
            report.overall.successes += 1;
            per_task[r.task_id].first += 1;
        }
    }
    report.overall.wilson = wilson_interval(report.overall.successes, report.overall.episodes);
    for (const auto& [task_id, counts] : per_task) {
        SuccessStats stats;
        stats.successes = counts.first;
        stats.episodes = counts.second;
        stats.wilson = wilson_interval(counts.first, counts.second);
        report.per_task[task_id] = stats;
    }
    return report;
}

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::Cpr: return "cpr";
    case StrategyKind::Lpr: return "lpr";
    case StrategyKind::Single: return "single";
    }
    return "single";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "cpr") return StrategyKind::Cpr;
    if (name == "lpr") return StrategyKind::Lpr;
    if (name == "single") return StrategyKind::Single;
    throw ValidationError("unknown strategy: " + name + " (expected cpr|lpr|single)");
}

Scenario load_scenario_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    Scenario s;
    for (const auto& item : doc.at("tasks")) {
        const auto& g = item.at("goal");
        const auto& st = item.at("start");
        s.tasks.push_back(make_variant(Cell{g.at(0).get<int>(), g.at(1).get<int>()},
                                       Cell{st.at(0).get<int>(), st.at(1).get<int>()},
                                       item.value("slip", 0.0)));
    }
    s.change_prob = doc.at("change_prob").get<double>();
    s.total_episodes = doc.at("total_episodes").get<int>();
    s.horizon = doc.value("horizon", 100);
    s.eval_window = doc.value("eval_window", std::max(1, s.total_episodes / 10));
    if (s.tasks.size() < 2) throw ValidationError("scenario needs at least two tasks");
    return s;
}

void save_scenario_json(const std::string& path, const Scenario& scenario) {
    nlohmann::ordered_json doc;
    doc["tasks"] = nlohmann::ordered_json::array();
    for (const GridMdp& m : scenario.tasks) {
        nlohmann::ordered_json item;
        item["goal"] = {m.goal.x, m.goal.y};
        item["start"] = {m.start.x, m.start.y};
        item["slip"] = m.slip_prob;
        doc["tasks"].push_back(std::move(item));
    }
    doc["change_prob"] = scenario.change_prob;
    doc["total_episodes"] = scenario.total_episodes;
    doc["horizon"] = scenario.horizon;
    doc["eval_window"] = scenario.eval_window;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write scenario file: " + path);
    out << doc.dump(2) << "\n";
}

void save_runlog_csv(const std::string& path, const RunLog& log) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write runlog file: " + path);
    out << "episode,task_id,policy_id,success,return\n";
    char buf[128];
    for (const EpisodeRecord& r : log.records) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g\n", r.episode, r.task_id, r.policy_id,
                      r.success ? 1 : 0, r.ret);
        out << buf;
    }
}

RunLog load_runlog_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open runlog file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("episode,task_id,policy_id,success,return", 0) != 0)
        throw ValidationError("runlog file missing expected header: " + path);
    RunLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EpisodeRecord r;
        int success = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%lg", &r.episode, &r.task_id, &r.policy_id,
                        &success, &r.ret) != 5)
            throw ValidationError("malformed runlog row: " + line);
        r.success = success != 0;
        log.records.push_back(r);
    }
    return log;
}

void save_success_report_json(const std::string& path, const SuccessReport& report) {
    auto stats_json = [](const SuccessStats& s) {
        nlohmann::ordered_json j;
        j["successes"] = s.successes;
        j["episodes"] = s.episodes;
        j["rate"] = s.wilson.rate;
        j["wilson_low"] = s.wilson.low;
        j["wilson_high"] = s.wilson.high;
        return j;
    };
    nlohmann::ordered_json doc;
    doc["window"] = report.window;
    doc["overall"] = stats_json(report.overall);
    doc["per_task"] = nlohmann::ordered_json::object();
    for (const auto& [task_id, stats] : report.per_task)
        doc["per_task"][std::to_string(task_id)] = stats_json(stats);
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write report file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace chirp
