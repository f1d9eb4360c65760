#pragma once

#include "divest/distributions.hpp"
#include "divest/divergence.hpp"
#include "divest/grid.hpp"
#include "divest/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace divest {

// =============================================================================
// Bandwidth ranges
// =============================================================================

/// h'_n = c_lower (log n / n)^exponent_lower,  h''_n = min(1, c_upper n^-exponent_upper),
/// with `grid_size` geometrically spaced bandwidths in between.
struct BandwidthRange {
    double c_lower = 0.15;
    double exponent_lower = 1.0 / 3.0;
    double c_upper = 2.0;
    double exponent_upper = 0.2;
    std::size_t grid_size = 12;

    /// Default rule for dimension d: exponents 1/(d+2) and 1/(d+4).
    static BandwidthRange default_for(int d);

    double lower(std::size_t n) const;
    double upper(std::size_t n) const;
    /// Geometric grid from lower(n) to upper(n); the geometric midpoint when grid_size == 1.
    std::vector<double> bandwidths(std::size_t n) const;
    /// ConfigError unless h'_n < h''_n <= 1 at every n and n h'_n / log n grows along the sorted schedule.
    void check_feasible(const std::vector<std::size_t>& n_schedule) const;
};

/// ((log(1/h') v log log n) / (n h'))^(a/2) v gamma_n^a v h''^(a/d)
double rate_envelope(std::size_t n, double h_lower, double h_upper, double gamma, double alpha, int d);

// =============================================================================
// Error decomposition
// =============================================================================

/// D^_a - D_a = delta1 + delta2 + delta3 on the grid, with
///   delta1 = D^_a - E^D^_a                         (stochastic term)
///   delta2 = int_A ((E fhat)^a - f^a) g^(1-a)      (bias on A)
///   delta3 = -int_{A^c} f^a g^(1-a)                (mass lost to thresholding)
/// delta3 carries a minus sign so that the three terms add up exactly.
struct ErrorDecomposition {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double d_alpha_hat = 0.0;    ///< D^_a on the grid
    double centered = 0.0;       ///< E^D^_a on the grid
    double d_alpha_grid = 0.0;   ///< D_a(f, g) on the grid
};

ErrorDecomposition decompose_error(std::span<const double> fhat_values, std::span<const double> smoothed_values,
                                   std::span<const double> f_values, std::span<const double> g_values,
                                   AlphaParam alpha, double gamma, const EvaluationGrid& grid);

ErrorDecomposition decompose_error(const SampleMatrix& sample, const AnalyticDensity& f, const AnalyticDensity& g,
                                   const KernelSpec& spec, double h, AlphaParam alpha, double gamma,
                                   const EvaluationGrid& grid);

// =============================================================================
// Sweeps
// =============================================================================

struct SweepConfig {
    AnalyticDensity f;
    AnalyticDensity g;
    double alpha = 0.5;
    KernelSpec kernel;
    BandwidthRange range;
    ThresholdSchedule thresholds;
    std::vector<std::size_t> n_schedule;
    std::size_t replications = 10;
    std::uint64_t seed = 0;
    EvaluationGrid grid;
    unsigned threads = 1;
};

struct SweepCell {
    std::size_t replication = 0;
    std::size_t n = 0;
    double h = 0.0;
    double gamma = 0.0;
    double d_alpha = 0.0;
    double renyi = 0.0;
    double tsallis = 0.0;
    double err_dalpha = 0.0;
    double err_renyi = 0.0;
    double err_tsallis = 0.0;
    ErrorDecomposition decomposition;
    double stochastic_sup = 0.0;  ///< ||fhat - E fhat|| on the grid
    double bias_sup = 0.0;        ///< ||E fhat - f|| on the grid
    double g_power_integral = 0.0;  ///< int g^(1-a) over the grid box
    double rate_bound = 0.0;
};

/// Bound checks from the stochastic/bias analysis, each with an additive slack.
struct BoundCheck {
    bool delta1_ok = true;
    bool delta2_ok = true;
    bool delta3_ok = true;
    double delta1_bound = 0.0;
    double delta2_bound = 0.0;
    double delta3_bound = 0.0;
    bool all() const { return delta1_ok && delta2_ok && delta3_ok; }
};

BoundCheck check_decomposition_bounds(const SweepCell& cell, double alpha, double slack = 1e-6);

struct SampleSizeSummary {
    std::size_t n = 0;
    double h_lower = 0.0;
    double h_upper = 0.0;
    double gamma = 0.0;
    double rate_bound = 0.0;
    std::vector<double> sup_err_dalpha;  ///< per replication, sup over h
    std::vector<double> sup_err_renyi;
    std::vector<double> sup_err_tsallis;
    double mean_sup_err_dalpha = 0.0;
    double mean_sup_err_renyi = 0.0;
    double mean_sup_err_tsallis = 0.0;
};

struct SweepResult {
    double alpha = 0.5;
    int dimension = 1;
    double exponent_lower = 0.0;
    TrueDivergences truth;
    std::vector<SweepCell> cells;  ///< ordered by (replication, n, h)
    std::vector<SampleSizeSummary> per_n;
};

/// Runs every (replication, n, h) cell. Samples come from derive_seed(seed, replication, n),
/// so results do not depend on the thread count.
SweepResult run_sweep(const SweepConfig& config);

// =============================================================================
// Rate fits
// =============================================================================

struct RateFit {
    bool defined = false;
    std::string reason;  ///< why the fit is undefined
    double fitted_exponent = 0.0;
    double theoretical_exponent = 0.0;
    double r_squared = 0.0;
};

/// Least-squares slope of log(error) on log(n). Theoretical exponent
/// -alpha/2 (1 - exponent_lower) drops the logarithmic factors.
RateFit fit_rate(const std::vector<std::size_t>& ns, const std::vector<double>& errors, double alpha,
                 double exponent_lower);
RateFit fit_rate(const SweepResult& result);

}  // namespace divest
