#include "chirp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace chirp {

void PointCloud::push(std::span<const double> point) {
    if (dim_ == 0) dim_ = point.size();
    if (point.size() != dim_)
        throw ValidationError("PointCloud: mixed point dimensions");
    data_.insert(data_.end(), point.begin(), point.end());
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

namespace {

struct DedupedCloud {
    std::vector<std::size_t> representative; // index of first occurrence per group
    std::vector<int> count;                  // multiplicity per group
    std::vector<std::vector<std::size_t>> members;
};

DedupedCloud dedupe(const PointCloud& cloud) {
    DedupedCloud out;
    std::map<std::vector<double>, int> seen;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        std::vector<double> key(p.begin(), p.end());
        auto [it, inserted] = seen.try_emplace(std::move(key), static_cast<int>(out.count.size()));
        if (inserted) {
            out.representative.push_back(i);
            out.count.push_back(0);
            out.members.emplace_back();
        }
        out.count[it->second] += 1;
        out.members[it->second].push_back(i);
    }
    return out;
}

/// Successive-shortest-path transportation solver over a dense bipartite
/// graph. Supplies and demands are integer multiplicities; Dijkstra runs with
/// node potentials and stops at the first deficient sink, after which
/// potentials advance by min(dist, dist_target).
struct TransportSolver {
    int n_src;
    int n_snk;
    const std::vector<double>& cost; // n_src * n_snk, row-major
    std::vector<int> supply;
    std::vector<int> demand;
    std::vector<std::vector<int>> flow;

    TransportSolver(const std::vector<double>& cost_matrix, std::vector<int> supplies,
                    std::vector<int> demands)
        : n_src(static_cast<int>(supplies.size())),
          n_snk(static_cast<int>(demands.size())),
          cost(cost_matrix),
          supply(std::move(supplies)),
          demand(std::move(demands)),
          flow(n_src, std::vector<int>(n_snk, 0)) {}

    double at(int u, int v) const { return cost[static_cast<std::size_t>(u) * n_snk + v]; }

    void solve() {
        long long remaining = 0;
        for (int s : supply) remaining += s;

        std::vector<double> pot_src(n_src, 0.0), pot_snk(n_snk, 0.0);
        std::vector<double> dist_src(n_src), dist_snk(n_snk);
        std::vector<int> parent_snk(n_snk); // source feeding each sink on the path
        std::vector<int> parent_src(n_src); // sink feeding each source (via residual arc)
        std::vector<char> done_src(n_src), done_snk(n_snk);
        constexpr double kInf = std::numeric_limits<double>::infinity();

        while (remaining > 0) {
            std::fill(dist_src.begin(), dist_src.end(), kInf);
            std::fill(dist_snk.begin(), dist_snk.end(), kInf);
            std::fill(done_src.begin(), done_src.end(), 0);
            std::fill(done_snk.begin(), done_snk.end(), 0);
            for (int u = 0; u < n_src; ++u)
                if (supply[u] > 0) dist_src[u] = 0.0;

            int target = -1;
            double target_dist = kInf;
            while (true) {
                // Next unfinished node of smallest tentative distance.
                double best = kInf;
                int best_u = -1, best_v = -1;
                for (int u = 0; u < n_src; ++u)
                    if (!done_src[u] && dist_src[u] < best) { best = dist_src[u]; best_u = u; }
                for (int v = 0; v < n_snk; ++v)
                    if (!done_snk[v] && dist_snk[v] < best) { best = dist_snk[v]; best_u = -1; best_v = v; }
                if (best == kInf) break;

                if (best_v >= 0) {
                    done_snk[best_v] = 1;
                    if (demand[best_v] > 0) { target = best_v; target_dist = best; break; }
                    // Residual arcs back to sources with positive flow.
                    for (int u = 0; u < n_src; ++u) {
                        if (done_src[u] || flow[u][best_v] <= 0) continue;
                        const double rc = -at(u, best_v) + pot_snk[best_v] - pot_src[u];
                        const double nd = best + std::max(0.0, rc);
                        if (nd < dist_src[u]) { dist_src[u] = nd; parent_src[u] = best_v; }
                    }
                } else {
                    done_src[best_u] = 1;
                    for (int v = 0; v < n_snk; ++v) {
                        if (done_snk[v]) continue;
                        const double rc = at(best_u, v) + pot_src[best_u] - pot_snk[v];
                        const double nd = best + std::max(0.0, rc);
                        if (nd < dist_snk[v]) { dist_snk[v] = nd; parent_snk[v] = best_u; }
                    }
                }
            }
            if (target < 0)
                throw NumericalError("transport: no augmenting path (unbalanced problem)");

            for (int u = 0; u < n_src; ++u)
                pot_src[u] += std::min(dist_src[u], target_dist);
            for (int v = 0; v < n_snk; ++v)
                pot_snk[v] += std::min(dist_snk[v], target_dist);

            // Walk the path backwards to find the bottleneck, then push.
            int bottleneck = demand[target];
            {
                int v = target;
                while (true) {
                    const int u = parent_snk[v];
                    if (dist_src[u] == 0.0 && supply[u] > 0) {
                        bottleneck = std::min(bottleneck, supply[u]);
                        break;
                    }
                    const int v_prev = parent_src[u];
                    bottleneck = std::min(bottleneck, flow[u][v_prev]);
                    v = v_prev;
                }
            }
            {
                int v = target;
                while (true) {
                    const int u = parent_snk[v];
                    flow[u][v] += bottleneck;
                    if (dist_src[u] == 0.0 && supply[u] > 0) {
                        supply[u] -= bottleneck;
                        break;
                    }
                    const int v_prev = parent_src[u];
                    flow[u][v_prev] -= bottleneck;
                    v = v_prev;
                }
                demand[target] -= bottleneck;
            }
            remaining -= bottleneck;
        }
    }
};

} // namespace

TransportPlan w1_exact(const PointCloud& x, const PointCloud& y) {
    if (x.size() != y.size())
        throw ValidationError("w1_exact: clouds must have equal size");
    if (x.size() == 0) throw ValidationError("w1_exact: empty clouds");
    if (x.dim() != y.dim())
        throw ValidationError("w1_exact: clouds must share dimension");

    const std::size_t n = x.size();
    const DedupedCloud dx = dedupe(x);
    const DedupedCloud dy = dedupe(y);
    const int ns = static_cast<int>(dx.count.size());
    const int nt = static_cast<int>(dy.count.size());

    std::vector<double> cost(static_cast<std::size_t>(ns) * nt);
    for (int u = 0; u < ns; ++u) {
        auto px = x.point(dx.representative[u]);
        for (int v = 0; v < nt; ++v)
            cost[static_cast<std::size_t>(u) * nt + v] = euclidean(px, y.point(dy.representative[v]));
    }

    TransportSolver solver(cost, dx.count, dy.count);
    solver.solve();

    // Expand group-to-group flow back into a point-level permutation.
    TransportPlan plan;
    plan.assignment.assign(n, -1);
    std::vector<std::size_t> next_member(dy.count.size(), 0);
    for (int u = 0; u < ns; ++u) {
        std::size_t taken = 0;
        for (int v = 0; v < nt; ++v) {
            for (int k = 0; k < solver.flow[u][v]; ++k) {
                const std::size_t xi = dx.members[u][taken++];
                const std::size_t yi = dy.members[v][next_member[v]++];
                plan.assignment[xi] = static_cast<int>(yi);
            }
        }
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += euclidean(x.point(i), y.point(static_cast<std::size_t>(plan.assignment[i])));
    plan.cost = total / static_cast<double>(n);
    return plan;
}

double w1_bruteforce(const PointCloud& x, const PointCloud& y) {
    if (x.size() != y.size())
        throw ValidationError("w1_bruteforce: clouds must have equal size");
    if (x.size() == 0) throw ValidationError("w1_bruteforce: empty clouds");
    if (x.dim() != y.dim())
        throw ValidationError("w1_bruteforce: clouds must share dimension");
    const std::size_t n = x.size();
    if (n > 8) throw ValidationError("w1_bruteforce: n > 8 rejected (factorial blowup)");

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += euclidean(x.point(i), y.point(static_cast<std::size_t>(perm[i])));
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(n);
}

double paired_mean_distance(const PointCloud& x, const PointCloud& y) {
    if (x.size() != y.size())
        throw ValidationError("paired_mean_distance: clouds must have equal size");
    if (x.size() == 0) throw ValidationError("paired_mean_distance: empty clouds");
    if (x.dim() != y.dim())
        throw ValidationError("paired_mean_distance: clouds must share dimension");
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += euclidean(x.point(i), y.point(i));
    return total / static_cast<double>(x.size());
}

} // namespace chirp
