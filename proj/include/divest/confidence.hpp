#pragma once

#include "divest/distributions.hpp"
#include "divest/divergence.hpp"
#include "divest/grid.hpp"
#include "divest/kernel.hpp"
#include "divest/sweep.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace divest {

/// Plug-in estimate of zeta(I) = sup_I (f int K^2)^(a/2) over the nodes of I_n.
struct ZetaEstimate {
    double value = 0.0;
    std::size_t region_nodes = 0;
    double k_square_integral = 0.0;
    double alpha = 0.5;
};

ZetaEstimate estimate_zeta(std::span<const double> fhat_values, double k_square_integral, AlphaParam alpha);

/// zeta(I) from the true density's supremum.
double oracle_zeta(const AnalyticDensity& f, double k_square_integral, AlphaParam alpha);

struct HalfWidths {
    double rate = 0.0;       ///< ((log(1/h) v log log n) / (n h))^(a/2)
    double b_tsallis = 0.0;
    double b_renyi = 0.0;
};

/// b_tsallis = zeta int g^(1-a) r / (1-a),  b_renyi = zeta r / ((1-a) gamma_floor^a).
HalfWidths compute_half_widths(const ZetaEstimate& zeta, std::size_t n, double h, AlphaParam alpha,
                               double g_integral, double gamma_floor);

enum class IntervalKind { Tsallis, Renyi };
std::string_view interval_kind_name(IntervalKind kind);

struct CertaintyInterval {
    double center = 0.0;
    double half_width = 0.0;
    IntervalKind kind = IntervalKind::Tsallis;
    std::size_t n = 0;
    double h = 0.0;
    double alpha = 0.5;
    double gamma_floor = 0.0;

    double lower() const { return center - half_width; }
    double upper() const { return center + half_width; }
    bool contains(double value) const { return value >= lower() && value <= upper(); }
};

/// Intervals estimate +- b (1 + epsilon) for the Tsallis and Renyi estimates.
std::pair<CertaintyInterval, CertaintyInterval> build_intervals(double tsallis_est, double renyi_est,
                                                                const HalfWidths& widths, double epsilon = 0.0);

// =============================================================================
// Coverage and zeta-consistency experiments
// =============================================================================

struct CoverageConfig {
    AnalyticDensity f;
    AnalyticDensity g;
    double alpha = 0.5;
    KernelSpec kernel;
    ThresholdSchedule thresholds;
    std::size_t n = 4000;
    double h = 0.2;
    std::optional<double> gamma_floor;  ///< falls back to f.support_floor()
    double epsilon = 0.0;
    std::size_t replications = 50;
    std::uint64_t seed = 0;
    EvaluationGrid grid;
    unsigned threads = 1;
};

struct CoverageRow {
    std::size_t replication = 0;
    ZetaEstimate zeta;
    CertaintyInterval tsallis;
    CertaintyInterval renyi;
    bool tsallis_covered = false;
    bool renyi_covered = false;
};

struct CoverageResult {
    TrueDivergences truth;
    double g_integral = 0.0;
    double gamma_floor = 0.0;
    std::vector<CoverageRow> rows;
    double tsallis_coverage = 0.0;
    double renyi_coverage = 0.0;
};

/// Resolves gamma_floor: explicit value, else the density's support floor, else ConfigError.
double resolve_gamma_floor(const AnalyticDensity& f, const std::optional<double>& explicit_floor);

CoverageResult run_coverage(const CoverageConfig& config);

struct ZetaTrendPoint {
    std::size_t n = 0;
    double h = 0.0;
    double mean_zeta = 0.0;
    double mean_abs_error = 0.0;  ///< mean over replications of |zeta_n - zeta|
};

/// zeta_n at the geometric midpoint of `range` for each n, averaged over replications.
std::vector<ZetaTrendPoint> zeta_trend(const AnalyticDensity& f, const KernelSpec& kernel, double alpha,
                                       const BandwidthRange& range, const ThresholdSchedule& thresholds,
                                       const std::vector<std::size_t>& n_schedule, std::size_t replications,
                                       std::uint64_t seed, const EvaluationGrid& grid, unsigned threads = 1);

/// Number of i with values[i+1] >= values[i] (violations of a strictly decreasing trend).
std::size_t count_inversions(const std::vector<double>& values);

}  // namespace divest
