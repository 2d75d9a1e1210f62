#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "dart/records.hpp"

namespace dart::analysis {

struct CurvePoint {
    double mean_tokens = 0.0;
    double accuracy = 0.0;  // in [0,1]
    int n = 1;
};

// Three-parameter logistic acc(t) = L / (1 + exp(-k (t - t0))), floor fixed
// at zero. rss is the weighted residual sum sum_i n_i (acc_i - model(t_i))^2.
struct SigmoidFit {
    double L = 0.0;
    double k = 0.0;
    double t0 = 0.0;
    double rss = 0.0;
    bool converged = false;

    double operator()(double t) const;
};

// Buckets (record, verdict) pairs into `num_bins` equal-population bins by
// reasoning token count; adjacent bins that collapse onto the same mean are
// merged so returned points are distinct in mean_tokens.
std::vector<CurvePoint> bin_points(const std::vector<GenerationRecord>& records,
                                   const std::vector<bool>& verdicts, int num_bins);

// Deterministic weighted least squares: coarse multi-start grid over (k, t0)
// with L seeded at the maximum observed accuracy, then damped Gauss-Newton.
// Refinement only ever improves on the best grid candidate. Throws on fewer
// than 4 points or flat accuracies (k unidentifiable).
SigmoidFit fit_sigmoid(const std::vector<CurvePoint>& points);

// Weighted residual vector and its analytic Jacobian d r_i / d (L, k, t0),
// with r_i = sqrt(n_i) (acc_i - model(t_i)). Exposed for gradient checks.
std::vector<double> fit_residuals(const std::vector<CurvePoint>& points, double L, double k,
                                  double t0);
std::vector<std::array<double, 3>> fit_jacobian(const std::vector<CurvePoint>& points, double L,
                                                double k, double t0);

// Smallest t with model(t) >= (1 - epsilon) * L, in closed form
// t0 + ln((1-epsilon)/epsilon) / k. Requires a converged fit.
double token_budget(const SigmoidFit& fit, double epsilon = 0.02);

struct MonotonicityResult {
    double spearman_rho = 0.0;
    // Adjacent grid pairs (by ascending alpha) where ACT increased.
    struct Violation {
        double alpha_lo, alpha_hi;
        double act_lo, act_hi;
    };
    std::vector<Violation> violations;
};

// Spearman rank correlation between alpha and ACT plus the list of adjacent
// increases. Requires >= 3 points with distinct alphas and non-constant ACT.
MonotonicityResult alpha_monotonicity(const std::vector<std::pair<double, double>>& series);

}  // namespace dart::analysis
