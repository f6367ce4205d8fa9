#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chirp/chirp_metric.hpp"

namespace chirp {

/// k-medoids result. labels[m] holds the medoid's MDP index, so every medoid
/// labels itself; cost is the sum of distances to assigned medoids.
struct ClusterAssignment {
    std::vector<int> medoids; // sorted ascending
    std::vector<int> labels;  // per MDP index -> medoid MDP index
    double cost = 0.0;
};

/// PAM: greedy BUILD initialization then best-improvement SWAP passes until no
/// single medoid swap reduces cost. Deterministic; ties break on lowest index.
/// `cost_trace`, when given, records the cost after BUILD and after each
/// applied swap (non-increasing).
ClusterAssignment k_medoids(const DistanceMatrix& d, int k, std::uint64_t seed,
                            std::vector<double>* cost_trace = nullptr);

/// Exhaustive search over all C(n,k) medoid sets; rejects n > 12.
ClusterAssignment brute_force_medoids(const DistanceMatrix& d, int k);

double within_cluster_cost(const DistanceMatrix& d, const ClusterAssignment& assignment);

/// assignment.json: {medoids:[...], labels:{mdp_id: medoid_id}, cost}.
void save_assignment_json(const std::string& path, const ClusterAssignment& assignment,
                          const std::vector<std::string>& mdp_ids);
ClusterAssignment load_assignment_json(const std::string& path,
                                       const std::vector<std::string>& mdp_ids);

} // namespace chirp
