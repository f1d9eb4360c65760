#pragma once

#include "divest/distributions.hpp"
#include "divest/grid.hpp"
#include "divest/kde.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace divest {

/// Order parameter alpha, strictly inside (0, 1).
class AlphaParam {
public:
    explicit AlphaParam(double alpha);
    double value() const { return alpha_; }

private:
    double alpha_;
};

/// Vanishing threshold gamma_n = beta * (log n)^(-delta).
struct ThresholdSchedule {
    double beta = 0.01;
    double delta = 1.0;

    void check() const;
    /// gamma_n for n >= 2; throws ParameterError for n < 2.
    double at(std::size_t n) const;
};

enum class IntegrationMethod { Quadrature, MonteCarlo };

struct DivergenceEstimate {
    double d_alpha = 0.0;  ///< thresholded plug-in integral of fhat^a g^(1-a)
    double alpha = 0.5;
    double renyi = 0.0;    ///< log(d_alpha) / (alpha - 1); +inf when d_alpha == 0
    double tsallis = 0.0;  ///< (d_alpha - 1) / (alpha - 1)
    IntegrationMethod method = IntegrationMethod::Quadrature;
    std::optional<double> mc_std_error;
    double threshold_used = 0.0;
    double mass_below_threshold = 0.0;  ///< g-mass of the excluded set
    /// Set when d_alpha falls outside [0, 1 + 1e-6]; the value is never clamped.
    bool out_of_range_warning = false;
};

using DensityEvaluator = std::function<double(std::span<const double>)>;

/// Fills renyi/tsallis/warning from d_alpha.
DivergenceEstimate make_estimate(double d_alpha, AlphaParam alpha, IntegrationMethod method, double threshold);

/// Trapezoid rule for int_A fhat^a g^(1-a), A = {fhat >= gamma}, from values
/// already tabulated on the grid.
DivergenceEstimate dalpha_quadrature(std::span<const double> fhat_values, std::span<const double> g_values,
                                     AlphaParam alpha, double gamma, const EvaluationGrid& grid);

/// Same, evaluating fhat and g at the grid nodes.
DivergenceEstimate dalpha_quadrature(const DensityEvaluator& fhat, const AnalyticDensity& g, AlphaParam alpha,
                                     double gamma, const EvaluationGrid& grid);

/// (1/m) sum_j (fhat(Y_j)/g(Y_j))^a 1{fhat(Y_j) >= gamma}, Y_j ~ g drawn from
/// substream j of `seed`. Result depends only on (inputs, m, seed).
DivergenceEstimate dalpha_monte_carlo(const DensityEvaluator& fhat, const AnalyticDensity& g, AlphaParam alpha,
                                      double gamma, std::size_t m, std::uint64_t seed, unsigned threads = 1);

double renyi_estimate(const DivergenceEstimate& est, AlphaParam alpha);
double tsallis_estimate(const DivergenceEstimate& est, AlphaParam alpha);
/// 1 - d_half; requires an estimate taken at alpha = 1/2.
double hellinger_estimate(const DivergenceEstimate& d_half);
/// -log d_half; +inf when d_half == 0.
double bhattacharyya_estimate(const DivergenceEstimate& d_half);

/// Trapezoid rule for int fhat log(fhat/g) over {fhat >= gamma, fhat > 0}.
/// DomainError if g vanishes where fhat is counted.
double kl_plugin(std::span<const double> fhat_values, std::span<const double> g_values, double gamma,
                 const EvaluationGrid& grid);
double kl_plugin(const DensityEvaluator& fhat, const AnalyticDensity& g, double gamma, const EvaluationGrid& grid);

struct MonteCarloValue {
    double value = 0.0;
    double std_error = 0.0;
};

/// (1/m) sum_j r_j log r_j 1{fhat(Y_j) >= gamma}, r_j = fhat(Y_j)/g(Y_j), Y_j ~ g.
/// Uses the same draws as dalpha_monte_carlo for a given seed.
MonteCarloValue kl_monte_carlo(const DensityEvaluator& fhat, const AnalyticDensity& g, double gamma, std::size_t m,
                               std::uint64_t seed, unsigned threads = 1);

/// Realized set membership {fhat >= gamma} per grid node.
std::vector<bool> threshold_region(std::span<const double> fhat_values, double gamma);

/// int_A (E fhat)^a g^(1-a) over the indicated nodes.
double centered_expectation_dalpha(std::span<const double> smoothed_values, std::span<const double> g_values,
                                   AlphaParam alpha, const std::vector<bool>& region, const EvaluationGrid& grid);
double centered_expectation_dalpha(const AnalyticDensity& f, const AnalyticDensity& g, const KernelSpec& spec,
                                   double h, AlphaParam alpha, const std::vector<bool>& region,
                                   const EvaluationGrid& grid);

/// int g^exponent over the grid box by the trapezoid rule.
double grid_power_integral(std::span<const double> g_values, double exponent, const EvaluationGrid& grid,
                           const std::vector<bool>* region = nullptr);

}  // namespace divest
