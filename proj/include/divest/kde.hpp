#pragma once

#include "divest/distributions.hpp"
#include "divest/grid.hpp"
#include "divest/kernel.hpp"

#include <span>
#include <vector>

namespace divest {

/// Kernel density estimator over a fixed sample:
///   fhat(x) = 1/(n h^d) sum_i K((x - X_i)/h),  0 < h <= 1.
/// Rows are kept sorted by their first coordinate and only rows within the
/// kernel support radius of x on that axis are summed. For the Gaussian kernel
/// the skipped terms are each below e^-32 K(0).
class KernelDensityEstimate {
public:
    KernelDensityEstimate(const SampleMatrix& sample, KernelSpec spec, double bandwidth);

    double operator()(std::span<const double> x) const;
    /// Values at every grid node, row-major. Each node is summed in the same
    /// order as pointwise evaluation, so the output is bit-identical to it for
    /// any thread count.
    std::vector<double> on_grid(const EvaluationGrid& grid, unsigned threads = 1) const;

    double bandwidth() const { return h_; }
    const KernelSpec& spec() const { return spec_; }
    std::size_t sample_size() const { return n_; }

private:
    double sum_at(const double* x) const;

    KernelSpec spec_;
    double h_;
    double scale_;  // 1 / (n h^d)
    std::size_t n_;
    std::vector<double> rows_;   // sorted by first coordinate, row-major
    std::vector<double> keys_;   // first coordinate of each sorted row
};

double kde_evaluate(const SampleMatrix& sample, const KernelSpec& spec, double h, std::span<const double> x);

std::vector<double> kde_evaluate_batch(const SampleMatrix& sample, const KernelSpec& spec, double h,
                                       const EvaluationGrid& grid, unsigned threads = 1);

/// E fhat_{n,h}(x) = int K(u) f(x - h u) du, by trapezoid quadrature over the
/// kernel support. Shipped densities are mixtures of product components, so
/// the integral splits into univariate ones. Each is computed with
/// `nodes_per_axis` nodes and again with twice as many; NumericError if the two
/// disagree by more than 1e-6 (relative to max(1, value)).
double smoothed_density(const AnalyticDensity& f, const KernelSpec& spec, double h, std::span<const double> x,
                        std::size_t nodes_per_axis = 801);

/// smoothed_density at every grid node; identical arithmetic to the pointwise form.
std::vector<double> smoothed_density_grid(const AnalyticDensity& f, const KernelSpec& spec, double h,
                                          const EvaluationGrid& grid, std::size_t nodes_per_axis = 801);

/// Exact density values at every grid node.
std::vector<double> density_on_grid(const AnalyticDensity& f, const EvaluationGrid& grid);

/// max_i |a_i - b_i|, the grid proxy for the sup-norm.
double sup_deviation(std::span<const double> a, std::span<const double> b);

}  // namespace divest
