#include "chirp/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "chirp/rng.hpp"
#include "chirp/stats.hpp"

namespace chirp {

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw ValidationError("pearson: need >= 3 paired values");
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw NumericalError("pearson: zero variance column, correlation undefined");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    return pearson(rx, ry);
}

std::vector<SampleBin> bin_equal_volume(std::vector<PairedSample> samples, std::size_t n_bins) {
    if (n_bins < 2) throw ValidationError("bin_equal_volume: need at least 2 bins");
    if (samples.size() < n_bins)
        throw ValidationError("bin_equal_volume: fewer samples than bins");
    std::stable_sort(samples.begin(), samples.end(),
                     [](const PairedSample& a, const PairedSample& b) { return a.chirp < b.chirp; });

    const std::size_t n = samples.size();
    const std::size_t base = n / n_bins;
    const std::size_t extra = n % n_bins; // first `extra` bins take one more
    std::vector<SampleBin> bins;
    bins.reserve(n_bins);
    std::size_t cursor = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const std::size_t len = base + (b < extra ? 1 : 0);
        std::vector<double> cs, ss;
        cs.reserve(len);
        ss.reserve(len);
        for (std::size_t i = cursor; i < cursor + len; ++i) {
            cs.push_back(samples[i].chirp);
            ss.push_back(samples[i].sopr);
        }
        bins.push_back(SampleBin{median(cs), median(ss), len});
        cursor += len;
    }
    return bins;
}

CorrelationReport correlate(const std::vector<PairedSample>& samples, std::size_t permutations,
                            std::uint64_t seed) {
    if (samples.size() < 3) throw ValidationError("correlate: need >= 3 samples");
    if (permutations < 100) throw ValidationError("correlate: need >= 100 permutations");

    const std::size_t n = samples.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(samples[i].chirp) || !std::isfinite(samples[i].sopr))
            throw ValidationError("correlate: non-finite sample");
        xs[i] = samples[i].chirp;
        ys[i] = samples[i].sopr;
    }

    CorrelationReport report;
    report.n = n;
    report.pearson_rho = pearson(xs, ys);
    report.spearman_rs = spearman(xs, ys);

    // Permutation test: only sum(x*y) changes under a shuffle of y, so the
    // statistic per permutation is one pass. Rank vectors reuse the same
    // shuffle for the Spearman p-value.
    const std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);

    auto perm_rho = [n](std::span<const double> a, std::span<const double> b) {
        const double ma = mean(a), mb = mean(b);
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sab += (a[i] - ma) * (b[i] - mb);
            saa += (a[i] - ma) * (a[i] - ma);
            sbb += (b[i] - mb) * (b[i] - mb);
        }
        return sab / std::sqrt(saa * sbb);
    };

    Rng rng(derive_seed({seed, 0xC0A}));
    std::size_t hits_p = 0, hits_s = 0;
    std::vector<double> ys_perm = ys;
    std::vector<double> ry_perm = ry;
    for (std::size_t p = 0; p < permutations; ++p) {
        // One shared shuffle per permutation keeps the two tests aligned.
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
            std::swap(ys_perm[i - 1], ys_perm[j]);
            std::swap(ry_perm[i - 1], ry_perm[j]);
        }
        if (std::abs(perm_rho(xs, ys_perm)) >= std::abs(report.pearson_rho)) ++hits_p;
        if (std::abs(perm_rho(rx, ry_perm)) >= std::abs(report.spearman_rs)) ++hits_s;
    }
    report.p_pearson =
        static_cast<double>(hits_p + 1) / static_cast<double>(permutations + 1);
    report.p_spearman =
        static_cast<double>(hits_s + 1) / static_cast<double>(permutations + 1);
    return report;
}

std::vector<double> isotonic_non_decreasing(std::span<const double> ys,
                                            std::span<const double> weights) {
    struct Block {
        double value;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        blocks.push_back({ys[i], w, 1});
        while (blocks.size() > 1 &&
               blocks[blocks.size() - 2].value > blocks[blocks.size() - 1].value) {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
            a.weight += b.weight;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    out.reserve(ys.size());
    for (const Block& b : blocks)
        for (std::size_t k = 0; k < b.count; ++k) out.push_back(b.value);
    return out;
}

namespace {

/// Non-zero B-spline basis values at x; returns the knot span index and fills
/// values[0..degree] for basis functions span-degree .. span.
int bspline_basis(const std::vector<double>& knots, int degree, double x,
                  std::array<double, 8>& values) {
    const int n_basis = static_cast<int>(knots.size()) - degree - 1;
    int span = degree;
    const int hi_span = n_basis - 1;
    while (span < hi_span && x >= knots[span + 1]) ++span;

    values[0] = 1.0;
    std::array<double, 8> left{}, right{};
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double term = denom == 0.0 ? 0.0 : values[r] / denom;
            values[r] = saved + right[r + 1] * term;
            saved = left[j - r] * term;
        }
        values[j] = saved;
    }
    return span;
}

/// Dense Cholesky solve of (A + lambda*I) c = b with escalating ridge on
/// failure; systems here are tiny (one row per bin).
std::vector<double> solve_spd(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (double lambda = 1e-12; lambda < 1.0; lambda *= 100.0) {
        std::vector<std::vector<double>> m = a;
        for (std::size_t i = 0; i < n; ++i) m[i][i] += lambda;
        std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = m[i][j];
                for (std::size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
                if (i == j) {
                    if (sum <= 0.0) {
                        ok = false;
                        break;
                    }
                    l[i][i] = std::sqrt(sum);
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        if (!ok) continue;
        std::vector<double> y(n, 0.0), x(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = b[i];
            for (std::size_t k = 0; k < i; ++k) sum -= l[i][k] * y[k];
            y[i] = sum / l[i][i];
        }
        for (std::size_t ii = n; ii > 0; --ii) {
            const std::size_t i = ii - 1;
            double sum = y[i];
            for (std::size_t k = i + 1; k < n; ++k) sum -= l[k][i] * x[k];
            x[i] = sum / l[i][i];
        }
        return x;
    }
    throw NumericalError("fit_calibration: normal equations are singular");
}

} // namespace

double CalibrationCurve::operator()(double chirp) const {
    const double x = std::clamp(chirp, domain_low, domain_high);
    std::array<double, 8> basis{};
    const int span = bspline_basis(knots, degree, x, basis);
    double value = 0.0;
    for (int r = 0; r <= degree; ++r)
        value += basis[static_cast<std::size_t>(r)] *
                 coefficients[static_cast<std::size_t>(span - degree + r)];
    return value;
}

CalibrationCurve fit_calibration(const std::vector<SampleBin>& bins) {
    if (bins.size() < 5)
        throw ValidationError("fit_calibration: need at least 5 bins for a cubic fit");
    const std::size_t nb = bins.size();
    std::vector<double> xs(nb), ys(nb), ws(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        xs[i] = bins[i].chirp_median;
        ys[i] = bins[i].sopr_median;
        ws[i] = static_cast<double>(bins[i].count);
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw ValidationError("fit_calibration: non-finite bin median");
    }
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw ValidationError("fit_calibration: bins must be ordered by chirp median");

    const std::vector<double> iso = isotonic_non_decreasing(ys, ws);

    CalibrationCurve curve;
    curve.degree = 3;
    curve.domain_low = xs.front();
    curve.domain_high = xs.back();
    if (curve.domain_high <= curve.domain_low) {
        // Degenerate (constant chirp); pin a flat curve over a unit span.
        curve.domain_high = curve.domain_low + 1.0;
    }

    const int interior = std::max(1, static_cast<int>(nb) - 4);
    curve.knots.assign(4, curve.domain_low);
    for (int i = 1; i <= interior; ++i)
        curve.knots.push_back(curve.domain_low + (curve.domain_high - curve.domain_low) * i /
                                                     (interior + 1));
    curve.knots.insert(curve.knots.end(), 4, curve.domain_high);
    const std::size_t n_basis = curve.knots.size() - 4;

    // Normal equations for the least-squares coefficients.
    std::vector<std::vector<double>> ata(n_basis, std::vector<double>(n_basis, 0.0));
    std::vector<double> atb(n_basis, 0.0);
    std::array<double, 8> basis{};
    for (std::size_t i = 0; i < nb; ++i) {
        const double x = std::clamp(xs[i], curve.domain_low, curve.domain_high);
        const int span = bspline_basis(curve.knots, 3, x, basis);
        for (int r = 0; r <= 3; ++r) {
            const std::size_t br = static_cast<std::size_t>(span - 3 + r);
            atb[br] += basis[static_cast<std::size_t>(r)] * iso[i];
            for (int c = 0; c <= 3; ++c) {
                const std::size_t bc = static_cast<std::size_t>(span - 3 + c);
                ata[br][bc] += basis[static_cast<std::size_t>(r)] *
                               basis[static_cast<std::size_t>(c)];
            }
        }
    }
    curve.coefficients = solve_spd(std::move(ata), std::move(atb));

    // Non-decreasing control points make the spline non-decreasing; clamping
    // them into [0,1] bounds it, since the basis is a partition of unity.
    curve.coefficients = isotonic_non_decreasing(curve.coefficients, {});
    for (double& c : curve.coefficients) c = std::clamp(c, 0.0, 1.0);
    return curve;
}

double calibrate(const CalibrationCurve& curve, double chirp) {
    return std::clamp(curve(chirp), 0.0, 1.0);
}

void save_pairs_csv(const std::string& path, const std::vector<PairedSample>& samples) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write pairs file: " + path);
    out << "pair_id,chirp,sopr\n";
    char buf[128];
    for (const PairedSample& s : samples) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", s.pair_id.c_str(), s.chirp, s.sopr);
        out << buf;
    }
}

std::vector<PairedSample> load_pairs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open pairs file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("pair_id,chirp,sopr", 0) != 0)
        throw ValidationError("pairs file missing pair_id,chirp,sopr header: " + path);
    std::vector<PairedSample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        PairedSample s;
        std::string field;
        if (!std::getline(ss, s.pair_id, ',')) continue;
        if (!std::getline(ss, field, ',')) throw ValidationError("pairs row missing chirp");
        s.chirp = std::stod(field);
        if (!std::getline(ss, field, ',')) throw ValidationError("pairs row missing sopr");
        s.sopr = std::stod(field);
        if (!std::isfinite(s.chirp) || !std::isfinite(s.sopr))
            throw ValidationError("pairs row with non-finite value");
        out.push_back(std::move(s));
    }
    return out;
}

void save_report_json(const std::string& path, const CorrelationReport& report,
                      bool below_recommended_n) {
    nlohmann::ordered_json doc;
    doc["pearson_rho"] = report.pearson_rho;
    doc["spearman_rs"] = report.spearman_rs;
    doc["p_pearson"] = report.p_pearson;
    doc["p_spearman"] = report.p_spearman;
    doc["n"] = report.n;
    if (below_recommended_n) doc["below_recommended_n"] = true;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write report file: " + path);
    out << doc.dump(2) << "\n";
}

void save_curve_json(const std::string& path, const CalibrationCurve& curve) {
    nlohmann::ordered_json doc;
    doc["degree"] = curve.degree;
    doc["knots"] = curve.knots;
    doc["coefficients"] = curve.coefficients;
    doc["domain"] = {curve.domain_low, curve.domain_high};
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write curve file: " + path);
    out << doc.dump(2) << "\n";
}

CalibrationCurve load_curve_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open curve file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    CalibrationCurve curve;
    curve.degree = doc.at("degree").get<int>();
    curve.knots = doc.at("knots").get<std::vector<double>>();
    curve.coefficients = doc.at("coefficients").get<std::vector<double>>();
    curve.domain_low = doc.at("domain").at(0).get<double>();
    curve.domain_high = doc.at("domain").at(1).get<double>();
    return curve;
}

} // namespace chirp
