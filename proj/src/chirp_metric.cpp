#include "chirp/chirp_metric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace chirp {

namespace {

void validate_common(const GridMdp& m_i, const GridMdp& m_j, const SamplingConfig& cfg) {
    if (m_i.grid_size != m_j.grid_size)
        throw ValidationError("sampling: MDPs must share a grid size");
    if (cfg.n_s <= 0) throw ValidationError("sampling: n_s must be positive");
    if (cfg.n_t <= 0) throw ValidationError("sampling: n_t must be positive");
}

/// Mean |realized reward - target| over both MDPs for one candidate pair.
/// Rewards are compared in the same unit-range scale the outcome vectors use.
double reward_match_score(const GridMdp& m_i, const GridMdp& m_j,
                          const std::pair<Cell, Action>& candidate, double target, Rng& rng) {
    const Transition t_i = step(m_i, reset_to(m_i, candidate.first), candidate.second, rng);
    const Transition t_j = step(m_j, reset_to(m_j, candidate.first), candidate.second, rng);
    return 0.5 * (std::abs(t_i.reward / m_i.reward_span() - target) +
                  std::abs(t_j.reward / m_j.reward_span() - target));
}

} // namespace

std::vector<std::pair<Cell, Action>> sample_random(const GridMdp& m_i, const GridMdp& m_j,
                                                   const SamplingConfig& cfg) {
    validate_common(m_i, m_j, cfg);
    if (cfg.scheme != SamplingScheme::Random)
        throw ValidationError("sample_random: config scheme is not Random");
    auto all = enumerate_state_actions(m_i);
    if (static_cast<std::size_t>(cfg.n_s) > all.size())
        throw ValidationError("sample_random: n_s exceeds the " + std::to_string(all.size()) +
                              " available state-action pairs");

    // Partial Fisher-Yates: the first n_s entries are a uniform draw without
    // replacement.
    Rng rng(cfg.seed);
    const std::size_t n = all.size();
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.n_s); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
        std::swap(all[i], all[j]);
    }
    all.resize(static_cast<std::size_t>(cfg.n_s));
    return all;
}

std::vector<std::pair<Cell, Action>> sample_reward_shaped(const GridMdp& m_i, const GridMdp& m_j,
                                                          const SamplingConfig& cfg) {
    validate_common(m_i, m_j, cfg);
    if (cfg.scheme != SamplingScheme::RewardShaped)
        throw ValidationError("sample_reward_shaped: config scheme is not RewardShaped");
    if (!cfg.mcce)
        throw ValidationError("sample_reward_shaped: mcce settings are required");
    const McceConfig& mcce = *cfg.mcce;
    if (mcce.population <= 0 || mcce.iterations <= 0)
        throw ValidationError("sample_reward_shaped: population and iterations must be positive");
    if (mcce.elite_fraction <= 0.0 || mcce.elite_fraction >= 1.0)
        throw ValidationError("sample_reward_shaped: elite_fraction must lie in (0,1)");
    const int elite_count = static_cast<int>(mcce.population * mcce.elite_fraction);
    if (elite_count < 1)
        throw ValidationError("sample_reward_shaped: population * elite_fraction < 1 "
                              "leaves the elite set empty");

    const auto all = enumerate_state_actions(m_i);
    // Achievable unit-range rewards span [-1, 0] in every variant.
    const double low = -1.0;
    const double high = 0.0;

    std::vector<std::pair<Cell, Action>> out;
    out.reserve(static_cast<std::size_t>(cfg.n_s));
    Rng target_rng(derive_seed({cfg.seed, 0xCE}));

    for (int t = 0; t < cfg.n_s; ++t) {
        const double target = target_rng.uniform_real(low, high);
        Rng rng(derive_seed({cfg.seed, static_cast<std::uint64_t>(t), 0x5EED}));

        std::vector<double> weights(all.size(), 1.0);
        std::size_t best_idx = 0;
        double best_score = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, std::size_t>> scored(
            static_cast<std::size_t>(mcce.population));

        for (int iter = 0; iter < mcce.iterations; ++iter) {
            for (int c = 0; c < mcce.population; ++c) {
                const std::size_t idx = rng.categorical(weights);
                const double score = reward_match_score(m_i, m_j, all[idx], target, rng);
                scored[static_cast<std::size_t>(c)] = {score, idx};
                if (score < best_score) {
                    best_score = score;
                    best_idx = idx;
                }
            }
            std::sort(scored.begin(), scored.end());
            std::fill(weights.begin(), weights.end(), 0.0);
            for (int e = 0; e < elite_count; ++e) weights[scored[e].second] += 1.0;
        }
        out.push_back(all[best_idx]);
    }
    return out;
}

EmpiricalTransitionSet build_empirical(const GridMdp& m_i, const GridMdp& m_j,
                                       std::span<const std::pair<Cell, Action>> pairs, int n_t,
                                       std::uint64_t seed) {
    if (pairs.empty()) throw ValidationError("build_empirical: no state-action pairs");
    if (n_t <= 0) throw ValidationError("build_empirical: n_t must be positive");

    const double scale = 1.0 / (m_i.grid_size - 1);
    // Reward coordinate is rescaled to [-1, 0] by each MDP's achievable range
    // so all five axes are comparable; raw rewards would let variants with a
    // short start-goal distance dominate the ground metric.
    auto outcome_vector = [scale](const GridMdp& m, const Transition& t) {
        return std::array<double, 5>{t.next_state.x * scale, t.next_state.y * scale,
                                     m.goal.x * scale, m.goal.y * scale,
                                     t.reward / m.reward_span()};
    };

    EmpiricalTransitionSet set;
    set.state_actions.assign(pairs.begin(), pairs.end());
    set.outcomes_i = PointCloud(5);
    set.outcomes_j = PointCloud(5);
    Rng rng(derive_seed({seed, 0xE111}));

    for (const auto& [cell, action] : pairs) {
        for (int rep = 0; rep < n_t; ++rep) {
            const Transition t_i = step(m_i, reset_to(m_i, cell), action, rng);
            const Transition t_j = step(m_j, reset_to(m_j, cell), action, rng);
            set.outcomes_i.push(outcome_vector(m_i, t_i));
            set.outcomes_j.push(outcome_vector(m_j, t_j));
        }
    }
    return set;
}

double chirp_exact(const GridMdp& m_i, const GridMdp& m_j) {
    if (m_i.slip_prob != 0.0 || m_j.slip_prob != 0.0)
        throw ValidationError("chirp_exact: requires slip-free MDPs; use estimate_chirp");
    if (m_i.grid_size != m_j.grid_size)
        throw ValidationError("chirp_exact: MDPs must share a grid size");
    const auto pairs = enumerate_state_actions(m_i);
    const EmpiricalTransitionSet set = build_empirical(m_i, m_j, pairs, 1, 0);
    return w1_exact(set.outcomes_i, set.outcomes_j).cost;
}

double estimate_chirp(const GridMdp& m_i, const GridMdp& m_j, const SamplingConfig& cfg) {
    const auto pairs = (cfg.scheme == SamplingScheme::Random)
                           ? sample_random(m_i, m_j, cfg)
                           : sample_reward_shaped(m_i, m_j, cfg);
    const EmpiricalTransitionSet set =
        build_empirical(m_i, m_j, pairs, cfg.n_t, derive_seed({cfg.seed, 0xB111D}));
    return w1_exact(set.outcomes_i, set.outcomes_j).cost;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(workers, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(n_threads));
    std::atomic<bool> failed{false};
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    failed.store(true);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed) throw NumericalError("parallel_for: a worker task failed");
}

DistanceMatrix distance_matrix(std::span<const GridMdp> mdps, const SamplingConfig& cfg,
                               int repeats, int workers) {
    if (mdps.size() < 2) throw ValidationError("distance_matrix: need at least two MDPs");
    if (repeats < 1) throw ValidationError("distance_matrix: repeats must be >= 1");

    const std::size_t n = mdps.size();
    DistanceMatrix matrix;
    matrix.repeats = repeats;
    matrix.entries.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) matrix.mdp_ids.push_back(std::to_string(i));

    std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) index_pairs.emplace_back(i, j);

    std::vector<double> results(index_pairs.size(), 0.0);
    parallel_for(index_pairs.size(), workers, [&](std::size_t k) {
        const auto [i, j] = index_pairs[k];
        std::vector<double> estimates;
        estimates.reserve(static_cast<std::size_t>(repeats));
        for (int rep = 0; rep < repeats; ++rep) {
            SamplingConfig derived = cfg;
            derived.seed = derive_seed({static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(j), cfg.seed,
                                        static_cast<std::uint64_t>(rep)});
            estimates.push_back(estimate_chirp(mdps[i], mdps[j], derived));
        }
        std::sort(estimates.begin(), estimates.end());
        const std::size_t m = estimates.size();
        results[k] = (m % 2 == 1) ? estimates[m / 2]
                                  : 0.5 * (estimates[m / 2 - 1] + estimates[m / 2]);
    });

    for (std::size_t k = 0; k < index_pairs.size(); ++k) {
        const auto [i, j] = index_pairs[k];
        matrix.entries[i][j] = results[k];
        matrix.entries[j][i] = results[k];
    }
    return matrix;
}

void save_matrix_csv(const std::string& path, const DistanceMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write matrix file: " + path);
    for (std::size_t i = 0; i < matrix.mdp_ids.size(); ++i)
        out << (i ? "," : "") << matrix.mdp_ids[i];
    out << "\n";
    char buf[64];
    for (const auto& row : matrix.entries) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.6g", row[j]);
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

DistanceMatrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file: " + path);
    DistanceMatrix matrix;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("matrix file is empty: " + path);
    {
        std::stringstream header(line);
        std::string id;
        while (std::getline(header, id, ',')) matrix.mdp_ids.push_back(id);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string fieldstr;
        while (std::getline(ss, fieldstr, ',')) row.push_back(std::stod(fieldstr));
        if (row.size() != matrix.mdp_ids.size())
            throw ValidationError("matrix row width does not match header: " + path);
        matrix.entries.push_back(std::move(row));
    }
    if (matrix.entries.size() != matrix.mdp_ids.size())
        throw ValidationError("matrix is not square: " + path);
    return matrix;
}

} // namespace chirp
