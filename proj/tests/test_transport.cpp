#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "chirp/rng.hpp"
#include "chirp/transport.hpp"

using namespace chirp;

namespace {

PointCloud cloud_1d(std::initializer_list<double> xs) {
    PointCloud c(1);
    for (double x : xs) {
        const double v[1] = {x};
        c.push(v);
    }
    return c;
}

PointCloud random_cloud(Rng& rng, std::size_t n, std::size_t dim, double span = 2.0) {
    PointCloud c(dim);
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : p) v = rng.uniform_real(-span, span);
        c.push(p);
    }
    return c;
}

PointCloud scaled(const PointCloud& c, double factor) {
    PointCloud out(c.dim());
    std::vector<double> p(c.dim());
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto src = c.point(i);
        for (std::size_t d = 0; d < c.dim(); ++d) p[d] = src[d] * factor;
        out.push(p);
    }
    return out;
}

bool same_multiset(const PointCloud& a, const PointCloud& b) {
    std::vector<std::vector<double>> va, vb;
    for (std::size_t i = 0; i < a.size(); ++i)
        va.emplace_back(a.point(i).begin(), a.point(i).end());
    for (std::size_t i = 0; i < b.size(); ++i)
        vb.emplace_back(b.point(i).begin(), b.point(i).end());
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    return va == vb;
}

} // namespace

TEST_CASE("identical clouds cost nothing") {
    Rng rng(11);
    const PointCloud x = random_cloud(rng, 5, 3);
    const TransportPlan plan = w1_exact(x, x);
    CHECK(plan.cost == 0.0);

    std::vector<int> seen(plan.assignment.begin(), plan.assignment.end());
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < 5; ++i) CHECK(seen[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("shifted pair on the line costs the shift") {
    const PointCloud x = cloud_1d({0.0, 1.0});
    const PointCloud y = cloud_1d({1.0, 2.0});
    // Both pairings average to 1: (1+1)/2 and (2+0)/2.
    CHECK(w1_exact(x, y).cost == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w1_bruteforce(x, y) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-point clouds reduce to the point distance") {
    PointCloud x(2), y(2);
    const double a[2] = {0.0, 3.0}, b[2] = {4.0, 0.0};
    x.push(a);
    y.push(b);
    CHECK(w1_bruteforce(x, y) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(w1_exact(x, y).cost == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("exact solver matches the permutation oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.bounded(6);
        const std::size_t dim = 1 + rng.bounded(5);
        const PointCloud x = random_cloud(rng, n, dim);
        const PointCloud y = random_cloud(rng, n, dim);
        const double exact = w1_exact(x, y).cost;
        const double brute = w1_bruteforce(x, y);
        CHECK(exact == doctest::Approx(brute).epsilon(1e-12));
        CHECK(exact >= 0.0);
    }
}

TEST_CASE("duplicate-heavy clouds still match the oracle") {
    Rng rng(202);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4 + rng.bounded(3); // 4..6
        PointCloud x(2), y(2);
        for (std::size_t i = 0; i < n; ++i) {
            // Coordinates on a coarse lattice force repeated points.
            const double a[2] = {static_cast<double>(rng.uniform_int(0, 1)),
                                 static_cast<double>(rng.uniform_int(0, 1))};
            const double b[2] = {static_cast<double>(rng.uniform_int(0, 1)),
                                 static_cast<double>(rng.uniform_int(0, 1))};
            x.push(a);
            y.push(b);
        }
        CHECK(w1_exact(x, y).cost == doctest::Approx(w1_bruteforce(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("metric axioms hold on random clouds") {
    Rng rng(303);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.bounded(6);
        const std::size_t dim = 1 + rng.bounded(4);
        const PointCloud a = random_cloud(rng, n, dim);
        const PointCloud b = random_cloud(rng, n, dim);
        const PointCloud c = random_cloud(rng, n, dim);
        const double ab = w1_exact(a, b).cost;
        const double ba = w1_exact(b, a).cost;
        const double ac = w1_exact(a, c).cost;
        const double cb = w1_exact(c, b).cost;
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ab <= ac + cb + 1e-9);
        if (same_multiset(a, b))
            CHECK(ab == 0.0);
        else
            CHECK(ab > 0.0);
    }
}

TEST_CASE("identity of indiscernibles for permuted clouds") {
    Rng rng(404);
    const PointCloud a = random_cloud(rng, 6, 3);
    PointCloud b(3);
    for (std::size_t i = a.size(); i > 0; --i) b.push(a.point(i - 1));
    REQUIRE(same_multiset(a, b));
    CHECK(w1_exact(a, b).cost == 0.0);
}

TEST_CASE("cost scales linearly with the coordinates") {
    Rng rng(505);
    const PointCloud x = random_cloud(rng, 6, 3);
    const PointCloud y = random_cloud(rng, 6, 3);
    const double base = w1_exact(x, y).cost;
    for (double lambda : {0.5, 2.0}) {
        const double scaled_cost = w1_exact(scaled(x, lambda), scaled(y, lambda)).cost;
        CHECK(scaled_cost == doctest::Approx(lambda * base).epsilon(1e-9));
    }
}

TEST_CASE("paired mean distance upper-bounds the exact cost") {
    const PointCloud x = cloud_1d({0.0, 1.0});
    const PointCloud y = cloud_1d({1.0, 0.0});
    CHECK(paired_mean_distance(x, x) == 0.0);
    CHECK(paired_mean_distance(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w1_exact(x, y).cost == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.bounded(6);
        const PointCloud a = random_cloud(rng, n, 3);
        const PointCloud b = random_cloud(rng, n, 3);
        CHECK(paired_mean_distance(a, b) >= w1_exact(a, b).cost - 1e-12);
    }
}

TEST_CASE("shape mismatches are rejected") {
    Rng rng(707);
    const PointCloud a = random_cloud(rng, 3, 2);
    const PointCloud b = random_cloud(rng, 4, 2);
    const PointCloud c = random_cloud(rng, 3, 3);
    CHECK_THROWS_AS(w1_exact(a, b), ValidationError);
    CHECK_THROWS_AS(w1_exact(a, c), ValidationError);
    CHECK_THROWS_AS(paired_mean_distance(a, b), ValidationError);
    const PointCloud big_x = random_cloud(rng, 9, 2);
    const PointCloud big_y = random_cloud(rng, 9, 2);
    CHECK_THROWS_AS(w1_bruteforce(big_x, big_y), ValidationError);
}

TEST_CASE("plan assignment is an optimal bijection") {
    Rng rng(808);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.bounded(5);
        const PointCloud x = random_cloud(rng, n, 2);
        const PointCloud y = random_cloud(rng, n, 2);
        const TransportPlan plan = w1_exact(x, y);
        REQUIRE(plan.assignment.size() == n);
        std::vector<int> seen(plan.assignment.begin(), plan.assignment.end());
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(seen[i] == static_cast<int>(i));

        double recomputed = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            recomputed +=
                euclidean(x.point(i), y.point(static_cast<std::size_t>(plan.assignment[i])));
        CHECK(plan.cost == doctest::Approx(recomputed / static_cast<double>(n)).epsilon(1e-12));
    }
}
