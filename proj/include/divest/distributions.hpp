#pragma once

#include "divest/grid.hpp"
#include "divest/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divest {

// =============================================================================
// Samples
// =============================================================================

/// n observations in R^d stored row-major, plus the seed that produced them.
struct SampleMatrix {
    std::size_t n = 0;
    int d = 0;
    std::vector<double> data;
    std::uint64_t seed = 0;

    SampleMatrix() = default;
    SampleMatrix(std::size_t rows, int dims, std::vector<double> values, std::uint64_t seed_ = 0);

    std::span<const double> row(std::size_t i) const { return {data.data() + i * d, static_cast<std::size_t>(d)}; }
};

// =============================================================================
// Analytic densities
// =============================================================================

enum class DensityFamily { Gaussian, GaussianMixture, UniformBox, TruncatedGaussian };

std::string_view density_family_name(DensityFamily family);

/// One univariate factor of a product component.
struct AxisFactor {
    enum class Kind { Normal, Uniform, TruncatedNormal };
    Kind kind = Kind::Normal;
    double mean = 0.0;
    double sd = 1.0;
    double lower = 0.0;  ///< support bounds for Uniform / TruncatedNormal
    double upper = 0.0;
    double norm = 1.0;   ///< truncation mass Phi(b) - Phi(a) for TruncatedNormal

    double pdf(double x) const;
    double log_pdf(double x) const;
    double sample(RandomStream& rng) const;
    /// Interval outside which the factor is zero (compact) or below e^-50 (normal).
    double effective_lower() const;
    double effective_upper() const;
    bool compact() const { return kind != Kind::Normal; }
};

struct ProductComponent {
    double weight = 1.0;
    std::vector<AxisFactor> axes;
};

/// Evaluatable, sampleable density on R^d, d <= 3. Every shipped family is a
/// finite mixture of product components, which keeps smoothing and oracle
/// integrals separable per axis. Immutable after construction.
class AnalyticDensity {
public:
    static AnalyticDensity gaussian(std::vector<double> mean, std::vector<double> sd);
    static AnalyticDensity mixture(std::vector<double> weights,
                                   std::vector<std::vector<double>> means,
                                   std::vector<std::vector<double>> sds);
    static AnalyticDensity uniform_box(std::vector<double> lower, std::vector<double> upper);
    static AnalyticDensity truncated_gaussian(std::vector<double> mean, std::vector<double> sd,
                                              std::vector<double> lower, std::vector<double> upper);

    DensityFamily family() const { return family_; }
    int dimension() const { return dimension_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<ProductComponent>& components() const { return components_; }

    double density(std::span<const double> x) const;
    /// log density; -inf outside the support.
    double log_density(std::span<const double> x) const;
    SampleMatrix draw_sample(std::size_t n, std::uint64_t seed) const;
    /// Draw number `index` of the stream identified by `seed`.
    void draw_one(std::uint64_t seed, std::uint64_t index, std::span<double> out) const;

    /// Compact support box, or nullopt for all of R^d.
    const std::optional<Box>& support() const { return support_; }
    /// Box containing all but a negligible (< e^-50 relative) part of the mass.
    const Box& effective_box() const { return effective_box_; }
    const std::optional<double>& lipschitz_bound() const { return lipschitz_; }
    const std::optional<int>& smoothness_order() const { return smoothness_; }
    /// inf of the density over its compact support (the positive floor gamma).
    const std::optional<double>& support_floor() const { return floor_; }
    /// Largest density value.
    double sup_density() const;

    bool same_parameters(const AnalyticDensity& other) const;

private:
    AnalyticDensity(DensityFamily family, int dimension, std::vector<double> params,
                    std::vector<ProductComponent> components);
    void finalize();

    DensityFamily family_;
    int dimension_;
    std::vector<double> params_;
    std::vector<ProductComponent> components_;
    std::optional<Box> support_;
    Box effective_box_;
    std::optional<double> lipschitz_;
    std::optional<int> smoothness_;
    std::optional<double> floor_;
};

// =============================================================================
// Ground truth
// =============================================================================

struct TrueDivergences {
    double alpha = 0.5;
    double d_alpha = 1.0;  ///< int f^a g^(1-a)
    double renyi = 0.0;
    double tsallis = 0.0;
    double kl = 0.0;       ///< +inf when supp f is not inside supp g
    double hellinger = 0.0;
    double bhattacharyya = 0.0;
    bool closed_form = false;  ///< Gaussian pair: closed form, cross-checked by quadrature
};

/// Adaptive Gauss-Kronrod integral of a function over a box (nested per axis).
double integrate_box(const std::function<double(std::span<const double>)>& fn, const Box& box,
                     double tolerance = 1e-11);

/// int g^exponent over R^d by adaptive quadrature.
double power_integral(const AnalyticDensity& g, double exponent);

/// High-resolution oracle for the divergences of f from g at the given alpha.
/// Gaussian pairs use closed forms and throw NumericError if quadrature
/// disagrees by more than 1e-6. Throws DomainError if the integrand tail test
/// fails.
TrueDivergences true_divergences(const AnalyticDensity& f, const AnalyticDensity& g, double alpha);

}  // namespace divest
