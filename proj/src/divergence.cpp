#include "divest/divergence.hpp"

#include "divest/error.hpp"
#include "divest/parallel.hpp"

#include <cmath>
#include <limits>

namespace divest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnitSlack = 1e-6;

void check_lengths(std::size_t a, std::size_t b, const EvaluationGrid& grid, const char* op) {
    if (a != grid.size() || b != grid.size())
        throw ParameterError(std::string(op) + ": value vectors must match the grid size");
}

double check_reference(double g) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("reference density is negative or non-finite");
    return g;
}

}  // namespace

AlphaParam::AlphaParam(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("alpha must lie strictly inside (0, 1), got " + std::to_string(alpha));
}

void ThresholdSchedule::check() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("threshold beta must be positive");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ParameterError("threshold delta must be nonnegative");
}

double ThresholdSchedule::at(std::size_t n) const {
    check();
    if (n < 2) throw ParameterError("threshold schedule is defined for n >= 2");
    return beta * std::pow(std::log(static_cast<double>(n)), -delta);
}

DivergenceEstimate make_estimate(double d_alpha, AlphaParam alpha, IntegrationMethod method, double threshold) {
    DivergenceEstimate est;
    est.d_alpha = d_alpha;
    est.alpha = alpha.value();
    est.method = method;
    est.threshold_used = threshold;
    est.renyi = renyi_estimate(est, alpha);
    est.tsallis = tsallis_estimate(est, alpha);
    est.out_of_range_warning = d_alpha < 0.0 || d_alpha > 1.0 + kUnitSlack;
    return est;
}

DivergenceEstimate dalpha_quadrature(std::span<const double> fhat_values, std::span<const double> g_values,
                                     AlphaParam alpha, double gamma, const EvaluationGrid& grid) {
    check_lengths(fhat_values.size(), g_values.size(), grid, "dalpha_quadrature");
    if (!(gamma >= 0.0)) throw ParameterError("dalpha_quadrature: threshold must be nonnegative");
    const double a = alpha.value();
    double integral = 0.0, g_mass = 0.0, g_excluded = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = check_reference(g_values[i]);
        const double w = grid.weight(i);
        g_mass += w * g;
        if (fhat_values[i] >= gamma) {
            const double term = std::pow(fhat_values[i], a) * std::pow(g, 1.0 - a);
            if (!std::isfinite(term)) throw NumericError("dalpha_quadrature: non-finite integrand");
            integral += w * term;
        } else {
            g_excluded += w * g;
        }
    }
    auto est = make_estimate(integral, alpha, IntegrationMethod::Quadrature, gamma);
    est.mass_below_threshold = g_mass > 0.0 ? g_excluded / g_mass : 0.0;
    return est;
}

DivergenceEstimate dalpha_quadrature(const DensityEvaluator& fhat, const AnalyticDensity& g, AlphaParam alpha,
                                     double gamma, const EvaluationGrid& grid) {
    std::vector<double> fv(grid.size());
    std::vector<double> x(grid.dimension());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        fv[i] = fhat(x);
    }
    return dalpha_quadrature(fv, density_on_grid(g, grid), alpha, gamma, grid);
}

DivergenceEstimate dalpha_monte_carlo(const DensityEvaluator& fhat, const AnalyticDensity& g, AlphaParam alpha,
                                      double gamma, std::size_t m, std::uint64_t seed, unsigned threads) {
    if (m < 2) throw ParameterError("dalpha_monte_carlo: need m >= 2 draws");
    if (!(gamma >= 0.0)) throw ParameterError("dalpha_monte_carlo: threshold must be nonnegative");
    const double a = alpha.value();
    const int d = g.dimension();
    std::vector<double> terms(m);
    std::vector<unsigned char> excluded(m, 0);

    constexpr std::size_t kBlock = 1024;
    const std::size_t blocks = (m + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        std::vector<double> y(d);
        const std::size_t end = std::min(m, (b + 1) * kBlock);
        for (std::size_t j = b * kBlock; j < end; ++j) {
            g.draw_one(seed, j, y);
            const double gy = g.density(y);
            if (!(gy > 0.0))
                throw NumericError("dalpha_monte_carlo: draw from g landed where g vanishes");
            const double fy = fhat(y);
            if (fy >= gamma) {
                terms[j] = std::pow(fy / gy, a);
            } else {
                terms[j] = 0.0;
                excluded[j] = 1;
            }
        }
    });

    // Fixed-order reduction.
    double sum = 0.0;
    std::size_t n_excluded = 0;
    for (std::size_t j = 0; j < m; ++j) {
        sum += terms[j];
        n_excluded += excluded[j];
    }
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t j = 0; j < m; ++j) ss += (terms[j] - mean) * (terms[j] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));

    auto est = make_estimate(mean, alpha, IntegrationMethod::MonteCarlo, gamma);
    est.mc_std_error = sd / std::sqrt(static_cast<double>(m));
    est.mass_below_threshold = static_cast<double>(n_excluded) / static_cast<double>(m);
    return est;
}

double renyi_estimate(const DivergenceEstimate& est, AlphaParam alpha) {
    if (est.d_alpha <= 0.0) return kInf;
    return std::log(est.d_alpha) / (alpha.value() - 1.0);
}

double tsallis_estimate(const DivergenceEstimate& est, AlphaParam alpha) {
    return (est.d_alpha - 1.0) / (alpha.value() - 1.0);
}

double hellinger_estimate(const DivergenceEstimate& d_half) {
    if (d_half.alpha != 0.5) throw ParameterError("hellinger_estimate needs an estimate taken at alpha = 1/2");
    return 1.0 - d_half.d_alpha;
}

double bhattacharyya_estimate(const DivergenceEstimate& d_half) {
    if (d_half.alpha != 0.5) throw ParameterError("bhattacharyya_estimate needs an estimate taken at alpha = 1/2");
    if (d_half.d_alpha <= 0.0) return kInf;
    return -std::log(d_half.d_alpha);
}

double kl_plugin(std::span<const double> fhat_values, std::span<const double> g_values, double gamma,
                 const EvaluationGrid& grid) {
    check_lengths(fhat_values.size(), g_values.size(), grid, "kl_plugin");
    double integral = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double fv = fhat_values[i];
        const double g = check_reference(g_values[i]);
        if (!(fv >= gamma) || !(fv > 0.0)) continue;
        if (!(g > 0.0)) throw DomainError("kl_plugin: reference density vanishes inside the estimated support");
        integral += grid.weight(i) * fv * std::log(fv / g);
    }
    if (!std::isfinite(integral)) throw NumericError("kl_plugin: non-finite integral");
    return integral;
}

double kl_plugin(const DensityEvaluator& fhat, const AnalyticDensity& g, double gamma, const EvaluationGrid& grid) {
    std::vector<double> fv(grid.size());
    std::vector<double> x(grid.dimension());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        fv[i] = fhat(x);
    }
    return kl_plugin(fv, density_on_grid(g, grid), gamma, grid);
}

MonteCarloValue kl_monte_carlo(const DensityEvaluator& fhat, const AnalyticDensity& g, double gamma, std::size_t m,
                               std::uint64_t seed, unsigned threads) {
    if (m < 2) throw ParameterError("kl_monte_carlo: need m >= 2 draws");
    const int d = g.dimension();
    std::vector<double> terms(m, 0.0);
    constexpr std::size_t kBlock = 1024;
    const std::size_t blocks = (m + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        std::vector<double> y(d);
        const std::size_t end = std::min(m, (b + 1) * kBlock);
        for (std::size_t j = b * kBlock; j < end; ++j) {
            g.draw_one(seed, j, y);
            const double gy = g.density(y);
            if (!(gy > 0.0)) throw NumericError("kl_monte_carlo: draw from g landed where g vanishes");
            const double fy = fhat(y);
            if (fy >= gamma && fy > 0.0) {
                const double r = fy / gy;
                terms[j] = r * std::log(r);
            }
        }
    });
    double sum = 0.0;
    for (double t : terms) sum += t;
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (double t : terms) ss += (t - mean) * (t - mean);
    return {mean, std::sqrt(ss / static_cast<double>(m - 1)) / std::sqrt(static_cast<double>(m))};
}

std::vector<bool> threshold_region(std::span<const double> fhat_values, double gamma) {
    std::vector<bool> region(fhat_values.size());
    for (std::size_t i = 0; i < fhat_values.size(); ++i) region[i] = fhat_values[i] >= gamma;
    return region;
}

double centered_expectation_dalpha(std::span<const double> smoothed_values, std::span<const double> g_values,
                                   AlphaParam alpha, const std::vector<bool>& region, const EvaluationGrid& grid) {
    check_lengths(smoothed_values.size(), g_values.size(), grid, "centered_expectation_dalpha");
    if (region.size() != grid.size()) throw ParameterError("centered_expectation_dalpha: region size mismatch");
    const double a = alpha.value();
    double integral = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!region[i]) continue;
        const double g = check_reference(g_values[i]);
        integral += grid.weight(i) * std::pow(smoothed_values[i], a) * std::pow(g, 1.0 - a);
    }
    return integral;
}

double centered_expectation_dalpha(const AnalyticDensity& f, const AnalyticDensity& g, const KernelSpec& spec,
                                   double h, AlphaParam alpha, const std::vector<bool>& region,
                                   const EvaluationGrid& grid) {
    return centered_expectation_dalpha(smoothed_density_grid(f, spec, h, grid), density_on_grid(g, grid), alpha,
                                       region, grid);
}

double grid_power_integral(std::span<const double> g_values, double exponent, const EvaluationGrid& grid,
                           const std::vector<bool>* region) {
    if (g_values.size() != grid.size()) throw ParameterError("grid_power_integral: size mismatch");
    double integral = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (region && !(*region)[i]) continue;
        integral += grid.weight(i) * std::pow(check_reference(g_values[i]), exponent);
    }
    if (!std::isfinite(integral)) throw NumericError("grid_power_integral: non-finite integral");
    return integral;
}

}  // namespace divest
