#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chirp/errors.hpp"

namespace chirp {

/// Uniformly weighted empirical point set; rows share one dimension.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::size_t dim) : dim_(dim) {}

    void push(std::span<const double> point);
    std::span<const double> point(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool operator==(const PointCloud&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

double euclidean(std::span<const double> a, std::span<const double> b);

/// Minimum-cost one-to-one matching between two equal-size clouds.
/// cost = (1/n) * sum ||x_k - y_assignment[k]||_2.
struct TransportPlan {
    std::vector<int> assignment;
    double cost = 0.0;
};

/// Exact 1-Wasserstein distance between equal-size uniform empirical measures.
/// Duplicate points are collapsed and the induced transportation problem is
/// solved with successive shortest paths, so sample sets with heavy
/// multiplicity (full-enumeration grids, repeated deterministic outcomes)
/// stay cheap. The returned assignment attains the Kantorovich infimum.
TransportPlan w1_exact(const PointCloud& x, const PointCloud& y);

/// Permutation-enumeration oracle; rejects n > 8.
double w1_bruteforce(const PointCloud& x, const PointCloud& y);

/// Mean distance under the index pairing; an upper bound on w1_exact cost.
double paired_mean_distance(const PointCloud& x, const PointCloud& y);

} // namespace chirp
