#include "dart/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dart/common.hpp"

namespace dart::analysis {

double SigmoidFit::operator()(double t) const { return L / (1.0 + std::exp(-k * (t - t0))); }

std::vector<CurvePoint> bin_points(const std::vector<GenerationRecord>& records,
                                   const std::vector<bool>& verdicts, int num_bins) {
    if (records.size() != verdicts.size()) {
        throw Error("bin_points: records and verdicts differ in length");
    }
    if (num_bins <= 0) throw Error("bin_points: num_bins must be positive");

    std::vector<std::pair<long long, bool>> samples;
    samples.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        samples.emplace_back(records[i].reasoning_tokens, verdicts[i]);
    }
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    size_t distinct = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        if (i == 0 || samples[i].first != samples[i - 1].first) ++distinct;
    }
    if (distinct < 2) throw Error("bin_points: need at least 2 distinct token counts");

    size_t n = samples.size();
    size_t bins = std::min<size_t>(static_cast<size_t>(num_bins), n);
    std::vector<CurvePoint> points;
    size_t start = 0;
    for (size_t b = 0; b < bins; ++b) {
        size_t count = n / bins + (b < n % bins ? 1 : 0);
        size_t end = start + count;
        long double token_sum = 0;
        size_t correct = 0;
        for (size_t i = start; i < end; ++i) {
            token_sum += samples[i].first;
            correct += samples[i].second ? 1 : 0;
        }
        CurvePoint p;
        p.mean_tokens = static_cast<double>(token_sum / count);
        p.accuracy = static_cast<double>(correct) / static_cast<double>(count);
        p.n = static_cast<int>(count);
        // Identical means carry no length signal; fold into the previous bin.
        if (!points.empty() && points.back().mean_tokens == p.mean_tokens) {
            CurvePoint& prev = points.back();
            double total = prev.n + p.n;
            prev.accuracy = (prev.accuracy * prev.n + p.accuracy * p.n) / total;
            prev.n += p.n;
        } else {
            points.push_back(p);
        }
        start = end;
    }
    return points;
}

std::vector<double> fit_residuals(const std::vector<CurvePoint>& points, double L, double k,
                                  double t0) {
    std::vector<double> r(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        double s = 1.0 / (1.0 + std::exp(-k * (points[i].mean_tokens - t0)));
        r[i] = std::sqrt(static_cast<double>(points[i].n)) * (points[i].accuracy - L * s);
    }
    return r;
}

std::vector<std::array<double, 3>> fit_jacobian(const std::vector<CurvePoint>& points, double L,
                                                double k, double t0) {
    std::vector<std::array<double, 3>> jac(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        double dt = points[i].mean_tokens - t0;
        double s = 1.0 / (1.0 + std::exp(-k * dt));
        double w = std::sqrt(static_cast<double>(points[i].n));
        // r = w (acc - L s); ds/dk = s(1-s) dt; ds/dt0 = -s(1-s) k
        jac[i][0] = -w * s;
        jac[i][1] = -w * L * s * (1.0 - s) * dt;
        jac[i][2] = w * L * s * (1.0 - s) * k;
    }
    return jac;
}

namespace {

double rss_of(const std::vector<CurvePoint>& points, double L, double k, double t0) {
    double rss = 0.0;
    for (const auto& r : fit_residuals(points, L, k, t0)) rss += r * r;
    return rss;
}

// Solves the 3x3 normal equations (J^T J) step = -J^T r by Gaussian
// elimination with partial pivoting. Returns false when singular.
bool solve_normal_equations(const std::vector<std::array<double, 3>>& jac,
                            const std::vector<double>& res, std::array<double, 3>& step) {
    double a[3][4] = {};
    for (size_t i = 0; i < jac.size(); ++i) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += jac[i][r] * jac[i][c];
            a[r][3] += -jac[i][r] * res[i];
        }
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (std::fabs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[pivot], a[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    for (int r = 0; r < 3; ++r) step[r] = a[r][3] / a[r][r];
    return true;
}

bool in_domain(double L, double k, double t0) {
    return L > 0.0 && L <= 1.0 && k > 0.0 && t0 > 0.0 && std::isfinite(L) && std::isfinite(k) &&
           std::isfinite(t0);
}

}  // namespace

SigmoidFit fit_sigmoid(const std::vector<CurvePoint>& points) {
    if (points.size() < 4) throw Error("fit_sigmoid: need at least 4 points");

    double acc_min = points[0].accuracy, acc_max = points[0].accuracy;
    double t_min = points[0].mean_tokens, t_max = points[0].mean_tokens;
    for (const auto& p : points) {
        acc_min = std::min(acc_min, p.accuracy);
        acc_max = std::max(acc_max, p.accuracy);
        t_min = std::min(t_min, p.mean_tokens);
        t_max = std::max(t_max, p.mean_tokens);
    }
    if (acc_max == acc_min) {
        throw Error("fit_sigmoid: flat accuracy data, steepness is unidentifiable");
    }
    double range = std::max(t_max - t_min, 1e-9);

    // Coarse deterministic grid: L at the observed ceiling, k log-spaced
    // around the scale of the token range, t0 spanning the range. Lowest
    // index wins ties so reruns are bit-stable.
    double best_L = std::min(1.0, std::max(acc_max, 1e-6));
    double best_k = 1.0 / range, best_t0 = std::max((t_min + t_max) / 2.0, 1e-9);
    double best_rss = std::numeric_limits<double>::infinity();
    for (int ki = 0; ki <= 16; ++ki) {
        double k = (0.05 / range) * std::pow(10.0, ki * 0.25);  // 0.05/R .. 500/R
        for (int ti = 0; ti <= 16; ++ti) {
            double t0 = t_min + (t_max - t_min) * ti / 16.0;
            if (!in_domain(best_L, k, std::max(t0, 1e-9))) continue;
            double rss = rss_of(points, best_L, k, std::max(t0, 1e-9));
            if (rss < best_rss) {
                best_rss = rss;
                best_k = k;
                best_t0 = std::max(t0, 1e-9);
            }
        }
    }

    // Damped Gauss-Newton refinement; steps that leave the domain or do not
    // improve are halved away, so rss is monotone from the grid candidate.
    double L = best_L, k = best_k, t0 = best_t0, rss = best_rss;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        auto res = fit_residuals(points, L, k, t0);
        auto jac = fit_jacobian(points, L, k, t0);
        std::array<double, 3> step{};
        if (!solve_normal_equations(jac, res, step)) break;

        double scale = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 30; ++halvings, scale *= 0.5) {
            double nL = L + scale * step[0];
            double nk = k + scale * step[1];
            double nt0 = t0 + scale * step[2];
            if (!in_domain(nL, nk, nt0)) continue;
            double nrss = rss_of(points, nL, nk, nt0);
            if (nrss < rss) {
                double param_move = std::fabs(nL - L) / std::max(std::fabs(L), 1e-12) +
                                    std::fabs(nk - k) / std::max(std::fabs(k), 1e-12) +
                                    std::fabs(nt0 - t0) / std::max(std::fabs(t0), 1e-12);
                double improvement = (rss - nrss) / std::max(rss, 1e-300);
                L = nL;
                k = nk;
                t0 = nt0;
                rss = nrss;
                accepted = true;
                if (param_move < 1e-10 || improvement < 1e-12 || rss < 1e-24) converged = true;
                break;
            }
        }
        if (!accepted) {
            // Stalled at a stationary point: either we are at the optimum
            // (tiny gradient) or the model cannot express the data.
            double gnorm = 0.0;
            for (size_t i = 0; i < jac.size(); ++i) {
                for (int c = 0; c < 3; ++c) gnorm += jac[i][c] * res[i] * jac[i][c] * res[i];
            }
            converged = std::sqrt(gnorm) < 1e-8 * std::max(1.0, rss) || rss < 1e-20;
            break;
        }
        if (converged) break;
    }

    SigmoidFit fit;
    fit.L = L;
    fit.k = k;
    fit.t0 = t0;
    fit.rss = rss;
    fit.converged = converged;
    return fit;
}

double token_budget(const SigmoidFit& fit, double epsilon) {
    if (!fit.converged) throw Error("token_budget: fit did not converge");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error("token_budget: epsilon must be in (0,1)");
    }
    return fit.t0 + std::log((1.0 - epsilon) / epsilon) / fit.k;
}

namespace {

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
    size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

MonotonicityResult alpha_monotonicity(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 3) throw Error("alpha_monotonicity: need at least 3 points");

    std::vector<std::pair<double, double>> sorted = series;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].first == sorted[i - 1].first) {
            throw Error("alpha_monotonicity: duplicate alpha " + format_alpha(sorted[i].first));
        }
    }

    std::vector<double> alphas, acts;
    for (const auto& [a, act] : sorted) {
        alphas.push_back(a);
        acts.push_back(act);
    }

    std::vector<double> ra = average_ranks(alphas);
    std::vector<double> rb = average_ranks(acts);
    size_t n = ra.size();
    double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cov += (ra[i] - mean) * (rb[i] - mean);
        var_a += (ra[i] - mean) * (ra[i] - mean);
        var_b += (rb[i] - mean) * (rb[i] - mean);
    }
    if (var_b == 0.0) {
        throw Error("alpha_monotonicity: constant series, ranks are degenerate");
    }

    MonotonicityResult result;
    result.spearman_rho = cov / std::sqrt(var_a * var_b);
    for (size_t i = 1; i < n; ++i) {
        if (acts[i] > acts[i - 1]) {
            result.violations.push_back({alphas[i - 1], alphas[i], acts[i - 1], acts[i]});
        }
    }
    return result;
}

}  // namespace dart::analysis
