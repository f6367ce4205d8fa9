#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chirp/chirp_metric.hpp"
#include "chirp/gridworld.hpp"
#include "chirp/stats.hpp"

namespace chirp {

/// Interleaved-task benchmark: after each episode the task switches to a
/// uniformly random different task with probability change_prob.
struct Scenario {
    std::vector<GridMdp> tasks;
    double change_prob = 0.1;
    int total_episodes = 20'000;
    int horizon = 100;
    int eval_window = 2'000;
};

/// Tabular Q-learner keyed by agent cell. Policies are task-blind on purpose:
/// sharing one table across dissimilar goals is exactly the interference the
/// benchmark measures.
struct QPolicy {
    int grid_size = 20;
    std::vector<std::array<double, 4>> q; // per passable cell index
    double alpha = 0.1;
    double epsilon = 1.0;
    double epsilon_decay = 0.999;
    double epsilon_floor = 0.05;
    double discount = 0.95;

    explicit QPolicy(int grid_size_ = 20)
        : grid_size(grid_size_),
          q(static_cast<std::size_t>((grid_size_ - 2) * (grid_size_ - 2)), {0, 0, 0, 0}) {}

    int greedy_action(int cell_index) const;
};

/// Per-task epsilon-greedy arm values with incremental mean updates.
class LprBandit {
public:
    LprBandit(int n_tasks, int n_arms, double epsilon = 0.1);

    int select(int task, Rng& rng) const;
    void update(int task, int arm, double reward);

    void warm_start(const std::vector<std::vector<double>>& values,
                    const std::vector<std::vector<long>>& counts);
    double value(int task, int arm) const { return values_[task][arm]; }

private:
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<long>> counts_;
    double epsilon_;
};

enum class StrategyKind { Cpr, Lpr, Single };

/// Optional warm start for pathology experiments: pre-trained policies and
/// pre-seeded bandit state.
struct LifelongWarmStart {
    std::vector<QPolicy> policies;
    std::vector<std::vector<double>> bandit_values;
    std::vector<std::vector<long>> bandit_counts;
};

struct ReuseStrategy {
    StrategyKind kind = StrategyKind::Single;
    int policy_count = 1;
    std::vector<int> task_to_policy;      // required for Cpr, ignored otherwise
    double bandit_epsilon = 0.1;          // Lpr exploration rate
    std::optional<LifelongWarmStart> warm_start;
};

struct EpisodeRecord {
    int episode = 0;
    int task_id = 0;
    int policy_id = 0;
    bool success = false;
    double ret = 0.0;
};

struct RunLog {
    std::vector<EpisodeRecord> records;
    std::uint64_t seed = 0;
    StrategyKind kind = StrategyKind::Single;
};

struct SuccessStats {
    std::size_t successes = 0;
    std::size_t episodes = 0;
    WilsonInterval wilson;
};

struct SuccessReport {
    SuccessStats overall;
    std::map<int, SuccessStats> per_task;
    std::size_t window = 0;
};

/// Fixed task-to-policy map from k-medoids clusters of the distance matrix;
/// cluster slots are numbered by ascending medoid index.
std::vector<int> cpr_policy_map(const DistanceMatrix& d, int k, std::uint64_t seed);

/// One epsilon-greedy episode from the task's start cell with per-step
/// Q-updates; decays epsilon afterwards. Returns success flag and the
/// discounted episode return.
std::pair<bool, double> q_learning_episode(QPolicy& policy, const GridMdp& mdp, int horizon,
                                           Rng& rng);

RunLog run_scenario(const Scenario& scenario, const ReuseStrategy& strategy, std::uint64_t seed);

SuccessReport evaluate_success(const RunLog& log, std::size_t window);

std::string strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

/// scenario.json / runlog.csv / report.json formats.
Scenario load_scenario_json(const std::string& path);
void save_scenario_json(const std::string& path, const Scenario& scenario);
void save_runlog_csv(const std::string& path, const RunLog& log);
RunLog load_runlog_csv(const std::string& path);
void save_success_report_json(const std::string& path, const SuccessReport& report);

} // namespace chirp
