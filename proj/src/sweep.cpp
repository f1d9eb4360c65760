#include "divest/sweep.hpp"

#include "divest/error.hpp"
#include "divest/kde.hpp"
#include "divest/parallel.hpp"
#include "divest/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace divest {

// -----------------------------------------------------------------------------
// BandwidthRange

BandwidthRange BandwidthRange::default_for(int d) {
    BandwidthRange r;
    r.c_lower = 0.5 * 0.3;
    r.exponent_lower = 1.0 / (d + 2);
    r.c_upper = 2.0;
    r.exponent_upper = 1.0 / (d + 4);
    r.grid_size = 12;
    return r;
}

double BandwidthRange::lower(std::size_t n) const {
    const double nn = static_cast<double>(n);
    return c_lower * std::pow(std::log(nn) / nn, exponent_lower);
}

double BandwidthRange::upper(std::size_t n) const {
    return std::min(1.0, c_upper * std::pow(static_cast<double>(n), -exponent_upper));
}

std::vector<double> BandwidthRange::bandwidths(std::size_t n) const {
    const double lo = lower(n), hi = upper(n);
    if (grid_size == 1) return {std::sqrt(lo * hi)};
    std::vector<double> hs(grid_size);
    const double ratio = std::log(hi / lo) / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i) hs[i] = lo * std::exp(ratio * static_cast<double>(i));
    hs.front() = lo;
    hs.back() = hi;
    return hs;
}

void BandwidthRange::check_feasible(const std::vector<std::size_t>& n_schedule) const {
    if (!(c_lower > 0.0) || !(c_upper > 0.0))
        throw ConfigError("bandwidth constants c_lower and c_upper must be positive");
    if (!(exponent_lower > 0.0 && exponent_lower < 1.0) || !(exponent_upper > 0.0 && exponent_upper < 1.0))
        throw ConfigError("bandwidth exponents must lie in (0, 1)");
    if (grid_size < 1) throw ConfigError("bandwidth grid_size must be >= 1");
    if (n_schedule.empty()) throw ConfigError("n_schedule is empty");
    std::vector<std::size_t> sorted = n_schedule;
    std::sort(sorted.begin(), sorted.end());
    double previous = -1.0;
    for (std::size_t n : sorted) {
        if (n < 3) throw ConfigError("every n in the schedule must be >= 3, got " + std::to_string(n));
        const double lo = lower(n), hi = upper(n);
        if (!(lo < hi))
            throw ConfigError("infeasible bandwidth range at n = " + std::to_string(n) + ": h' = " +
                              std::to_string(lo) + " >= h'' = " + std::to_string(hi));
        const double growth = static_cast<double>(n) * lo / std::log(static_cast<double>(n));
        if (!(growth > previous))
            throw ConfigError("n h'_n / log n does not grow along the schedule at n = " + std::to_string(n));
        previous = growth;
    }
}

double rate_envelope(std::size_t n, double h_lower, double h_upper, double gamma, double alpha, int d) {
    const double nn = static_cast<double>(n);
    const double num = std::max(std::log(1.0 / h_lower), std::log(std::log(nn)));
    const double stochastic = std::pow(num / (nn * h_lower), alpha / 2.0);
    const double threshold = std::pow(gamma, alpha);
    const double bias = std::pow(h_upper, alpha / d);
    return std::max({stochastic, threshold, bias});
}

// -----------------------------------------------------------------------------
// Decomposition

ErrorDecomposition decompose_error(std::span<const double> fhat_values, std::span<const double> smoothed_values,
                                   std::span<const double> f_values, std::span<const double> g_values,
                                   AlphaParam alpha, double gamma, const EvaluationGrid& grid) {
    const std::size_t m = grid.size();
    if (fhat_values.size() != m || smoothed_values.size() != m || f_values.size() != m || g_values.size() != m)
        throw ParameterError("decompose_error: value vectors must match the grid size");
    const double a = alpha.value();
    ErrorDecomposition out;
    double d_hat = 0.0, centered = 0.0, truth = 0.0, bias_on_a = 0.0, lost = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = grid.weight(i);
        const double gw = std::pow(g_values[i], 1.0 - a);
        const double fa = std::pow(f_values[i], a) * gw;
        truth += w * fa;
        if (fhat_values[i] >= gamma) {
            const double ha = std::pow(fhat_values[i], a) * gw;
            const double ea = std::pow(smoothed_values[i], a) * gw;
            d_hat += w * ha;
            centered += w * ea;
            bias_on_a += w * (ea - fa);
        } else {
            lost += w * fa;
        }
    }
    out.d_alpha_hat = d_hat;
    out.centered = centered;
    out.d_alpha_grid = truth;
    out.delta1 = d_hat - centered;
    out.delta2 = bias_on_a;
    out.delta3 = -lost;
    return out;
}

ErrorDecomposition decompose_error(const SampleMatrix& sample, const AnalyticDensity& f, const AnalyticDensity& g,
                                   const KernelSpec& spec, double h, AlphaParam alpha, double gamma,
                                   const EvaluationGrid& grid) {
    const auto fhat = kde_evaluate_batch(sample, spec, h, grid);
    const auto smooth = smoothed_density_grid(f, spec, h, grid);
    return decompose_error(fhat, smooth, density_on_grid(f, grid), density_on_grid(g, grid), alpha, gamma, grid);
}

BoundCheck check_decomposition_bounds(const SweepCell& cell, double alpha, double slack) {
    BoundCheck check;
    const double G = cell.g_power_integral;
    const double s1 = std::pow(cell.stochastic_sup, alpha);
    const double s2 = std::pow(cell.bias_sup, alpha);
    check.delta1_bound = s1 * G;
    check.delta2_bound = s2 * G;
    check.delta3_bound = (s2 + std::pow(cell.gamma, alpha)) * G;
    check.delta1_ok = std::abs(cell.decomposition.delta1) <= check.delta1_bound + slack;
    check.delta2_ok = std::abs(cell.decomposition.delta2) <= check.delta2_bound + slack;
    check.delta3_ok = std::abs(cell.decomposition.delta3) <= check.delta3_bound + slack;
    return check;
}

// -----------------------------------------------------------------------------
// Sweep

SweepResult run_sweep(const SweepConfig& config) {
    const AlphaParam alpha(config.alpha);
    const double a = alpha.value();
    config.kernel.check();
    config.thresholds.check();
    config.range.check_feasible(config.n_schedule);
    if (config.replications < 1) throw ConfigError("replications must be >= 1");
    const int d = config.kernel.dimension;
    if (config.f.dimension() != d || config.g.dimension() != d || config.grid.dimension() != d)
        throw ConfigError("f, g, kernel and grid must share one dimension");

    SweepResult result;
    result.alpha = a;
    result.dimension = d;
    result.exponent_lower = config.range.exponent_lower;
    result.truth = true_divergences(config.f, config.g, a);

    const EvaluationGrid& grid = config.grid;
    const auto f_values = density_on_grid(config.f, grid);
    const auto g_values = density_on_grid(config.g, grid);
    const double g_integral = grid_power_integral(g_values, 1.0 - a, grid);

    const std::size_t n_count = config.n_schedule.size();
    std::vector<std::vector<double>> bandwidths(n_count);
    std::vector<std::vector<std::vector<double>>> smoothed(n_count);  // [n][h][node]
    std::vector<std::vector<double>> bias_sup(n_count);
    for (std::size_t k = 0; k < n_count; ++k) {
        bandwidths[k] = config.range.bandwidths(config.n_schedule[k]);
        smoothed[k].resize(bandwidths[k].size());
        bias_sup[k].resize(bandwidths[k].size());
        parallel_for(bandwidths[k].size(), config.threads, [&](std::size_t j) {
            smoothed[k][j] = smoothed_density_grid(config.f, config.kernel, bandwidths[k][j], grid);
            bias_sup[k][j] = sup_deviation(smoothed[k][j], f_values);
        });
    }

    // Cell blocks: one per (replication, n), each covering every bandwidth.
    const std::size_t tasks = config.replications * n_count;
    std::vector<std::vector<SweepCell>> blocks(tasks);
    parallel_for(tasks, config.threads, [&](std::size_t t) {
        const std::size_t rep = t / n_count;
        const std::size_t k = t % n_count;
        const std::size_t n = config.n_schedule[k];
        const double gamma = config.thresholds.at(n);
        const double h_lo = config.range.lower(n), h_hi = config.range.upper(n);
        const double envelope = rate_envelope(n, h_lo, h_hi, gamma, a, d);
        const SampleMatrix sample = config.f.draw_sample(n, derive_seed(config.seed, rep, n));

        auto& cells = blocks[t];
        for (std::size_t j = 0; j < bandwidths[k].size(); ++j) {
            const double h = bandwidths[k][j];
            const auto fhat = KernelDensityEstimate(sample, config.kernel, h).on_grid(grid, 1);
            SweepCell cell;
            cell.replication = rep;
            cell.n = n;
            cell.h = h;
            cell.gamma = gamma;
            cell.decomposition = decompose_error(fhat, smoothed[k][j], f_values, g_values, alpha, gamma, grid);
            const auto est = make_estimate(cell.decomposition.d_alpha_hat, alpha, IntegrationMethod::Quadrature, gamma);
            cell.d_alpha = est.d_alpha;
            cell.renyi = est.renyi;
            cell.tsallis = est.tsallis;
            cell.err_dalpha = std::abs(est.d_alpha - result.truth.d_alpha);
            cell.err_renyi = std::abs(est.renyi - result.truth.renyi);
            cell.err_tsallis = std::abs(est.tsallis - result.truth.tsallis);
            cell.stochastic_sup = sup_deviation(fhat, smoothed[k][j]);
            cell.bias_sup = bias_sup[k][j];
            cell.g_power_integral = g_integral;
            cell.rate_bound = envelope;
            cells.push_back(cell);
        }
    });

    for (auto& block : blocks)
        for (auto& cell : block) result.cells.push_back(cell);

    for (std::size_t k = 0; k < n_count; ++k) {
        const std::size_t n = config.n_schedule[k];
        SampleSizeSummary s;
        s.n = n;
        s.h_lower = config.range.lower(n);
        s.h_upper = config.range.upper(n);
        s.gamma = config.thresholds.at(n);
        s.rate_bound = rate_envelope(n, s.h_lower, s.h_upper, s.gamma, a, d);
        for (std::size_t rep = 0; rep < config.replications; ++rep) {
            double sd = 0.0, sr = 0.0, st = 0.0;
            for (const auto& cell : blocks[rep * n_count + k]) {
                sd = std::max(sd, cell.err_dalpha);
                sr = std::max(sr, cell.err_renyi);
                st = std::max(st, cell.err_tsallis);
            }
            s.sup_err_dalpha.push_back(sd);
            s.sup_err_renyi.push_back(sr);
            s.sup_err_tsallis.push_back(st);
        }
        const double reps = static_cast<double>(config.replications);
        s.mean_sup_err_dalpha = std::accumulate(s.sup_err_dalpha.begin(), s.sup_err_dalpha.end(), 0.0) / reps;
        s.mean_sup_err_renyi = std::accumulate(s.sup_err_renyi.begin(), s.sup_err_renyi.end(), 0.0) / reps;
        s.mean_sup_err_tsallis = std::accumulate(s.sup_err_tsallis.begin(), s.sup_err_tsallis.end(), 0.0) / reps;
        result.per_n.push_back(std::move(s));
    }
    return result;
}

// -----------------------------------------------------------------------------
// Rate fits

RateFit fit_rate(const std::vector<std::size_t>& ns, const std::vector<double>& errors, double alpha,
                 double exponent_lower) {
    RateFit fit;
    fit.theoretical_exponent = -alpha / 2.0 * (1.0 - exponent_lower);
    if (ns.size() != errors.size()) throw ParameterError("fit_rate: ns and errors differ in length");
    std::vector<std::size_t> distinct = ns;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        fit.reason = "need at least 3 distinct sample sizes";
        return fit;
    }
    for (double e : errors) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            fit.reason = "errors must be positive and finite";
            return fit;
        }
    }
    const std::size_t m = ns.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = std::log(static_cast<double>(ns[i]));
        y[i] = std::log(errors[i]);
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.defined = true;
    fit.fitted_exponent = sxy / sxx;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return fit;
}

RateFit fit_rate(const SweepResult& result) {
    std::vector<std::size_t> ns;
    std::vector<double> errs;
    for (const auto& s : result.per_n) {
        ns.push_back(s.n);
        errs.push_back(s.mean_sup_err_dalpha);
    }
    return fit_rate(ns, errs, result.alpha, result.exponent_lower);
}

}  // namespace divest
