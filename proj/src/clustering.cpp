#include "chirp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace chirp {

namespace {

void validate_matrix(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    if (n == 0) throw ValidationError("k_medoids: empty distance matrix");
    for (std::size_t i = 0; i < n; ++i) {
        if (d.entries[i].size() != n) throw ValidationError("k_medoids: matrix is not square");
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d.entries[i][j];
            if (!(v >= 0.0)) throw ValidationError("k_medoids: negative or NaN distance");
            if (std::abs(v - d.entries[j][i]) > 1e-9)
                throw ValidationError("k_medoids: matrix is not symmetric");
        }
    }
}

/// Nearest-medoid labels and total cost; ties go to the lowest medoid index.
void assign_labels(const DistanceMatrix& d, ClusterAssignment& a) {
    const std::size_t n = d.size();
    a.labels.assign(n, -1);
    a.cost = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        double best = std::numeric_limits<double>::infinity();
        int best_medoid = -1;
        for (int medoid : a.medoids) {
            const double dist = d.entries[m][static_cast<std::size_t>(medoid)];
            if (dist < best) {
                best = dist;
                best_medoid = medoid;
            }
        }
        a.labels[m] = best_medoid;
        a.cost += best;
    }
}

} // namespace

ClusterAssignment k_medoids(const DistanceMatrix& d, int k, std::uint64_t /*seed*/,
                            std::vector<double>* cost_trace) {
    validate_matrix(d);
    const int n = static_cast<int>(d.size());
    if (k < 1 || k > n) throw ValidationError("k_medoids: k must satisfy 1 <= k <= n");

    ClusterAssignment a;

    // BUILD: start from the point with minimal row sum, then greedily add the
    // medoid giving the largest cost reduction.
    std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
    std::vector<double> nearest(static_cast<std::size_t>(n),
                                std::numeric_limits<double>::infinity());
    {
        int first = 0;
        double best_sum = std::numeric_limits<double>::infinity();
        for (int c = 0; c < n; ++c) {
            double sum = 0.0;
            for (int m = 0; m < n; ++m) sum += d.entries[m][c];
            if (sum < best_sum) {
                best_sum = sum;
                first = c;
            }
        }
        a.medoids.push_back(first);
        is_medoid[static_cast<std::size_t>(first)] = 1;
        for (int m = 0; m < n; ++m) nearest[m] = d.entries[m][first];
    }
    while (static_cast<int>(a.medoids.size()) < k) {
        int pick = -1;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n; ++c) {
            if (is_medoid[c]) continue;
            double gain = 0.0;
            for (int m = 0; m < n; ++m)
                gain += std::max(0.0, nearest[m] - d.entries[m][c]);
            if (gain > best_gain) {
                best_gain = gain;
                pick = c;
            }
        }
        a.medoids.push_back(pick);
        is_medoid[static_cast<std::size_t>(pick)] = 1;
        for (int m = 0; m < n; ++m) nearest[m] = std::min(nearest[m], d.entries[m][pick]);
    }
    std::sort(a.medoids.begin(), a.medoids.end());
    assign_labels(d, a);
    if (cost_trace) cost_trace->push_back(a.cost);

    // SWAP: apply the single best-improving (medoid, candidate) exchange until
    // none improves the cost.
    while (true) {
        double best_cost = a.cost;
        int best_out = -1, best_in = -1;
        for (std::size_t mi = 0; mi < a.medoids.size(); ++mi) {
            for (int c = 0; c < n; ++c) {
                if (is_medoid[c]) continue;
                ClusterAssignment trial;
                trial.medoids = a.medoids;
                trial.medoids[mi] = c;
                std::sort(trial.medoids.begin(), trial.medoids.end());
                assign_labels(d, trial);
                if (trial.cost < best_cost - 1e-15) {
                    best_cost = trial.cost;
                    best_out = static_cast<int>(mi);
                    best_in = c;
                }
            }
        }
        if (best_in < 0) break;
        is_medoid[static_cast<std::size_t>(a.medoids[static_cast<std::size_t>(best_out)])] = 0;
        is_medoid[static_cast<std::size_t>(best_in)] = 1;
        a.medoids[static_cast<std::size_t>(best_out)] = best_in;
        std::sort(a.medoids.begin(), a.medoids.end());
        assign_labels(d, a);
        if (cost_trace) cost_trace->push_back(a.cost);
    }
    return a;
}

ClusterAssignment brute_force_medoids(const DistanceMatrix& d, int k) {
    validate_matrix(d);
    const int n = static_cast<int>(d.size());
    if (n > 12) throw ValidationError("brute_force_medoids: n > 12 rejected");
    if (k < 1 || k > n) throw ValidationError("brute_force_medoids: k must satisfy 1 <= k <= n");

    std::vector<int> combo(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) combo[i] = i;

    ClusterAssignment best;
    best.cost = std::numeric_limits<double>::infinity();
    while (true) {
        ClusterAssignment trial;
        trial.medoids = combo;
        assign_labels(d, trial);
        if (trial.cost < best.cost) best = trial;

        // Next lexicographic combination.
        int i = k - 1;
        while (i >= 0 && combo[i] == n - k + i) --i;
        if (i < 0) break;
        ++combo[i];
        for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
    return best;
}

double within_cluster_cost(const DistanceMatrix& d, const ClusterAssignment& assignment) {
    const std::size_t n = d.size();
    if (assignment.labels.size() != n)
        throw ValidationError("within_cluster_cost: label count does not match matrix size");
    double cost = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const int medoid = assignment.labels[m];
        if (medoid < 0 || static_cast<std::size_t>(medoid) >= n)
            throw ValidationError("within_cluster_cost: label out of range");
        cost += d.entries[m][static_cast<std::size_t>(medoid)];
    }
    return cost;
}

void save_assignment_json(const std::string& path, const ClusterAssignment& assignment,
                          const std::vector<std::string>& mdp_ids) {
    nlohmann::ordered_json doc;
    doc["medoids"] = nlohmann::ordered_json::array();
    for (int m : assignment.medoids) doc["medoids"].push_back(mdp_ids[static_cast<std::size_t>(m)]);
    doc["labels"] = nlohmann::ordered_json::object();
    for (std::size_t m = 0; m < assignment.labels.size(); ++m)
        doc["labels"][mdp_ids[m]] = mdp_ids[static_cast<std::size_t>(assignment.labels[m])];
    doc["cost"] = assignment.cost;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write assignment file: " + path);
    out << doc.dump(2) << "\n";
}

ClusterAssignment load_assignment_json(const std::string& path,
                                       const std::vector<std::string>& mdp_ids) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open assignment file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    auto index_of = [&](const std::string& id) {
        for (std::size_t i = 0; i < mdp_ids.size(); ++i)
            if (mdp_ids[i] == id) return static_cast<int>(i);
        throw ValidationError("assignment references unknown mdp id: " + id);
    };
    ClusterAssignment a;
    for (const auto& m : doc.at("medoids")) a.medoids.push_back(index_of(m.get<std::string>()));
    a.labels.assign(mdp_ids.size(), -1);
    for (const auto& [key, value] : doc.at("labels").items())
        a.labels[static_cast<std::size_t>(index_of(key))] = index_of(value.get<std::string>());
    a.cost = doc.at("cost").get<double>();
    return a;
}

} // namespace chirp
