#pragma once

#include "divest/distributions.hpp"
#include "divest/divergence.hpp"
#include "divest/grid.hpp"
#include "divest/kernel.hpp"
#include "divest/sweep.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace divest {

/// Parameters of one analytic density as written in a config file.
struct DensitySpec {
    DensityFamily family = DensityFamily::Gaussian;
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> weights;                 // mixture only
    std::vector<std::vector<double>> means;      // mixture only
    std::vector<std::vector<double>> sds;        // mixture only

    AnalyticDensity build() const;
    int dimension() const;
};

struct EstimateSettings {
    std::size_t n = 2000;
    std::optional<double> h;  // geometric midpoint of the bandwidth range when absent
};

struct IntervalSettings {
    std::size_t n = 4000;
    std::optional<double> h;
    std::optional<double> gamma_floor;
    double epsilon = 0.0;
    std::size_t replications = 50;
};

struct ExperimentConfig {
    DensitySpec f_spec;
    DensitySpec g_spec;
    KernelSpec kernel;
    std::vector<double> alphas{0.5};
    std::vector<std::size_t> n_schedule{500, 2000, 8000};
    BandwidthRange range;
    ThresholdSchedule thresholds;
    std::size_t replications = 10;
    std::uint64_t seed = 0;
    Box grid_box;
    std::size_t points_per_axis = 0;
    std::size_t mc_samples = 100000;
    std::string output_dir = "out";
    EstimateSettings estimate;
    IntervalSettings ci;

    int dimension() const { return kernel.dimension; }
    AnalyticDensity f() const { return f_spec.build(); }
    AnalyticDensity g() const { return g_spec.build(); }
    EvaluationGrid grid() const { return EvaluationGrid(grid_box, points_per_axis); }
    /// Bandwidth used by the estimate and ci commands at sample size n.
    static double midpoint_bandwidth(const BandwidthRange& range, std::size_t n);
};

/// Parses and validates a JSON config. Missing fields take their defaults.
/// Errors are ConfigError with a "line N:" prefix pointing into `text`.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a config file; ConfigError if it cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Checks alpha, bandwidth-range feasibility, the grid, positivity of g on the
/// grid box and finiteness of int g^(1-a). Throws ConfigError.
void validate_config(const ExperimentConfig& config);

/// Every setting with defaults filled in; excludes the output directory so
/// reports do not depend on where they are written.
nlohmann::json materialize(const ExperimentConfig& config);

nlohmann::json density_spec_to_json(const DensitySpec& spec);

}  // namespace divest
