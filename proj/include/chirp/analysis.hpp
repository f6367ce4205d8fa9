#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chirp/errors.hpp"

namespace chirp {

struct PairedSample {
    double chirp = 0.0;
    double sopr = 0.0;
    std::string pair_id;
};

struct SampleBin {
    double chirp_median = 0.0;
    double sopr_median = 0.0;
    std::size_t count = 0;
};

struct CorrelationReport {
    double pearson_rho = 0.0;
    double spearman_rs = 0.0;
    double p_pearson = 1.0;
    double p_spearman = 1.0;
    std::size_t n = 0;
};

/// Least-squares cubic B-spline through isotonic bin medians. Coefficients are
/// themselves non-decreasing and clamped to [0,1], which forces the curve to
/// be monotone and bounded without pointwise fixups.
struct CalibrationCurve {
    int degree = 3;
    std::vector<double> knots;        // clamped knot vector
    std::vector<double> coefficients;
    double domain_low = 0.0;
    double domain_high = 1.0;

    double operator()(double chirp) const;
};

double pearson(std::span<const double> xs, std::span<const double> ys);
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Sorts by chirp and splits into contiguous bins whose sizes differ by at
/// most one; each bin reports median chirp, median sopr and its count.
std::vector<SampleBin> bin_equal_volume(std::vector<PairedSample> samples, std::size_t n_bins);

/// Pearson + Spearman with two-sided permutation p-values (shuffled sopr
/// column). Throws on zero variance in either column.
CorrelationReport correlate(const std::vector<PairedSample>& samples, std::size_t permutations,
                            std::uint64_t seed);

CalibrationCurve fit_calibration(const std::vector<SampleBin>& bins);

/// Spline evaluation with the input clamped to the curve domain and the
/// output clamped to [0,1].
double calibrate(const CalibrationCurve& curve, double chirp);

/// Pool-adjacent-violators isotonic regression (non-decreasing), weighted.
std::vector<double> isotonic_non_decreasing(std::span<const double> ys,
                                            std::span<const double> weights);

/// pairs.csv: header pair_id,chirp,sopr.
void save_pairs_csv(const std::string& path, const std::vector<PairedSample>& samples);
std::vector<PairedSample> load_pairs_csv(const std::string& path);

void save_report_json(const std::string& path, const CorrelationReport& report,
                      bool below_recommended_n = false);
void save_curve_json(const std::string& path, const CalibrationCurve& curve);
CalibrationCurve load_curve_json(const std::string& path);

} // namespace chirp
