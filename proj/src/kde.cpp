#include "divest/kde.hpp"

#include "divest/error.hpp"
#include "divest/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace divest {

namespace {

constexpr std::size_t kNodeBlock = 64;

void check_bandwidth(double h) {
    if (!(h > 0.0 && h <= 1.0))
        throw ParameterError("bandwidth must lie in (0, 1], got " + std::to_string(h));
}

// int k(u) phi(x - h u) du over the part of the kernel support where phi is nonzero.
double smoothed_factor_trapezoid(const AxisFactor& factor, KernelFamily family, double h, double x,
                                 std::size_t nodes) {
    const double radius = kernel_support_radius(family);
    double lo = -radius, hi = radius;
    if (factor.compact()) {
        lo = std::max(lo, (x - factor.upper) / h);
        hi = std::min(hi, (x - factor.lower) / h);
    }
    if (!(lo < hi)) return 0.0;
    const double step = (hi - lo) / static_cast<double>(nodes - 1);
    double acc = 0.5 * (kernel_base(family, lo) * factor.pdf(x - h * lo) +
                        kernel_base(family, hi) * factor.pdf(x - h * hi));
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        const double u = lo + step * static_cast<double>(i);
        acc += kernel_base(family, u) * factor.pdf(x - h * u);
    }
    return acc * step;
}

double smoothed_factor(const AxisFactor& factor, KernelFamily family, double h, double x, std::size_t nodes) {
    const double coarse = smoothed_factor_trapezoid(factor, family, h, x, nodes);
    const double fine = smoothed_factor_trapezoid(factor, family, h, x, 2 * nodes - 1);
    if (!std::isfinite(fine) || std::abs(fine - coarse) > 1e-6 * std::max(1.0, std::abs(fine)))
        throw NumericError("smoothed_density: quadrature did not converge within the node budget");
    return fine;
}

void check_dims(const AnalyticDensity& f, const KernelSpec& spec) {
    spec.check();
    if (f.dimension() != spec.dimension) throw ParameterError("density and kernel dimensions differ");
}

}  // namespace

KernelDensityEstimate::KernelDensityEstimate(const SampleMatrix& sample, KernelSpec spec, double bandwidth)
    : spec_(spec), h_(bandwidth), n_(sample.n) {
    spec_.check();
    check_bandwidth(h_);
    if (sample.d != spec_.dimension)
        throw ParameterError("sample dimension " + std::to_string(sample.d) + " does not match kernel dimension " +
                             std::to_string(spec_.dimension));
    if (sample.n < 1) throw ParameterError("sample is empty");
    scale_ = 1.0 / (static_cast<double>(sample.n) * std::pow(h_, spec_.dimension));

    const int d = spec_.dimension;
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample.row(a)[0] < sample.row(b)[0]; });
    rows_.resize(n_ * d);
    keys_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto r = sample.row(order[i]);
        std::copy(r.begin(), r.end(), rows_.begin() + i * d);
        keys_[i] = r[0];
    }
}

double KernelDensityEstimate::sum_at(const double* x) const {
    const int d = spec_.dimension;
    const double reach = kernel_support_radius(spec_.family) * h_;
    const double inv_h = 1.0 / h_;
    const auto first = std::lower_bound(keys_.begin(), keys_.end(), x[0] - reach) - keys_.begin();
    const auto last = std::upper_bound(keys_.begin(), keys_.end(), x[0] + reach) - keys_.begin();
    double acc = 0.0;
    for (auto i = first; i < last; ++i) {
        const double* row = rows_.data() + i * d;
        double prod = 1.0;
        for (int k = 0; k < d; ++k) prod *= kernel_base(spec_.family, (x[k] - row[k]) * inv_h);
        acc += prod;
    }
    return acc;
}

double KernelDensityEstimate::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != spec_.dimension) throw ParameterError("query point has wrong dimension");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("kde: non-finite query point");
    return sum_at(x.data()) * scale_;
}

std::vector<double> KernelDensityEstimate::on_grid(const EvaluationGrid& grid, unsigned threads) const {
    if (grid.dimension() != spec_.dimension) throw ParameterError("grid dimension does not match kernel dimension");
    const int d = spec_.dimension;
    std::vector<double> out(grid.size(), 0.0);
    const std::size_t blocks = (grid.size() + kNodeBlock - 1) / kNodeBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        std::vector<double> x(d);
        const std::size_t last = std::min(grid.size(), (b + 1) * kNodeBlock);
        for (std::size_t j = b * kNodeBlock; j < last; ++j) {
            grid.node(j, x);
            out[j] = sum_at(x.data()) * scale_;
        }
    });
    return out;
}

double kde_evaluate(const SampleMatrix& sample, const KernelSpec& spec, double h, std::span<const double> x) {
    return KernelDensityEstimate(sample, spec, h)(x);
}

std::vector<double> kde_evaluate_batch(const SampleMatrix& sample, const KernelSpec& spec, double h,
                                       const EvaluationGrid& grid, unsigned threads) {
    return KernelDensityEstimate(sample, spec, h).on_grid(grid, threads);
}

double smoothed_density(const AnalyticDensity& f, const KernelSpec& spec, double h, std::span<const double> x,
                        std::size_t nodes_per_axis) {
    check_dims(f, spec);
    check_bandwidth(h);
    if (nodes_per_axis < 3) throw ParameterError("smoothed_density: need at least 3 nodes per axis");
    double total = 0.0;
    for (const auto& c : f.components()) {
        double prod = c.weight;
        for (int k = 0; k < spec.dimension; ++k)
            prod *= smoothed_factor(c.axes[k], spec.family, h, x[k], nodes_per_axis);
        total += prod;
    }
    return total;
}

std::vector<double> smoothed_density_grid(const AnalyticDensity& f, const KernelSpec& spec, double h,
                                          const EvaluationGrid& grid, std::size_t nodes_per_axis) {
    check_dims(f, spec);
    check_bandwidth(h);
    if (nodes_per_axis < 3) throw ParameterError("smoothed_density: need at least 3 nodes per axis");
    const int d = spec.dimension;
    const std::size_t m = grid.points_per_axis();
    const auto& comps = f.components();

    // factors[c][k][i] = smoothed univariate factor at axis coordinate i.
    std::vector<std::vector<std::vector<double>>> factors(comps.size(),
                                                          std::vector<std::vector<double>>(d, std::vector<double>(m)));
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (int k = 0; k < d; ++k)
            for (std::size_t i = 0; i < m; ++i)
                factors[c][k][i] =
                    smoothed_factor(comps[c].axes[k], spec.family, h, grid.axis_coordinate(k, i), nodes_per_axis);

    std::vector<double> out(grid.size());
    std::vector<std::size_t> idx(d);
    for (std::size_t node = 0; node < grid.size(); ++node) {
        grid.unravel(node, idx);
        double total = 0.0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            double prod = comps[c].weight;
            for (int k = 0; k < d; ++k) prod *= factors[c][k][idx[k]];
            total += prod;
        }
        out[node] = total;
    }
    return out;
}

std::vector<double> density_on_grid(const AnalyticDensity& f, const EvaluationGrid& grid) {
    if (grid.dimension() != f.dimension()) throw ParameterError("grid and density dimensions differ");
    std::vector<double> out(grid.size());
    std::vector<double> x(grid.dimension());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        out[i] = f.density(x);
    }
    return out;
}

double sup_deviation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ParameterError("sup_deviation: length mismatch (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace divest
