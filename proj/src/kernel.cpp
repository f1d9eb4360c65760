#include "divest/kernel.hpp"

#include "divest/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace divest {

namespace {

constexpr double kGaussianRadius = 8.0;
constexpr int kLegendrePoints = 10;

// Composite Gauss-Legendre rule on the base kernel's support. Panel edges sit
// on the integers (and at 0) so |u|^j moments stay exact on compact families.
struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

AxisRule axis_rule(KernelFamily family) {
    using Rule = boost::math::quadrature::gauss<double, kLegendrePoints>;
    const double radius = kernel_support_radius(family);
    const int panels = family == KernelFamily::Gaussian ? 16 : 2;
    const double width = 2.0 * radius / panels;

    // boost stores the non-negative half of the symmetric rule.
    std::vector<double> ref_x, ref_w;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        const double x = Rule::abscissa()[i];
        const double w = Rule::weights()[i];
        ref_x.push_back(x);
        ref_w.push_back(w);
        if (x != 0.0) {
            ref_x.push_back(-x);
            ref_w.push_back(w);
        }
    }

    AxisRule rule;
    for (int p = 0; p < panels; ++p) {
        const double mid = -radius + (p + 0.5) * width;
        for (std::size_t i = 0; i < ref_x.size(); ++i) {
            rule.nodes.push_back(mid + 0.5 * width * ref_x[i]);
            rule.weights.push_back(0.5 * width * ref_w[i]);
        }
    }
    return rule;
}

// All multi-indices in d dimensions with total degree in [1, max_degree].
std::vector<std::vector<int>> multi_indices(int d, int max_degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(d, 0);
    while (true) {
        int total = 0;
        for (int v : idx) total += v;
        if (total >= 1 && total <= max_degree) out.push_back(idx);
        int k = 0;
        while (k < d) {
            if (++idx[k] <= max_degree) break;
            idx[k] = 0;
            ++k;
        }
        if (k == d) break;
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        int sa = 0, sb = 0;
        for (int v : a) sa += v;
        for (int v : b) sb += v;
        return sa < sb;
    });
    return out;
}

int total_degree(const std::vector<int>& j) {
    int s = 0;
    for (int v : j) s += v;
    return s;
}

}  // namespace

void KernelSpec::check() const {
    if (dimension < 1 || dimension > 3)
        throw ParameterError("kernel dimension must be in [1, 3], got " + std::to_string(dimension));
    if (claimed_order < 2)
        throw ParameterError("kernel order must be >= 2, got " + std::to_string(claimed_order));
}

KernelFamily kernel_family_from_name(std::string_view name) {
    if (name == "gaussian") return KernelFamily::Gaussian;
    if (name == "epanechnikov") return KernelFamily::EpanechnikovProduct;
    if (name == "box") return KernelFamily::UniformBox;
    throw ParameterError("unknown kernel family '" + std::string(name) +
                         "' (expected gaussian | epanechnikov | box)");
}

std::string_view kernel_family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::EpanechnikovProduct: return "epanechnikov";
        case KernelFamily::UniformBox: return "box";
    }
    return "unknown";
}

double kernel_base(KernelFamily family, double t) {
    switch (family) {
        case KernelFamily::Gaussian:
            return std::exp(-0.5 * t * t) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
        case KernelFamily::EpanechnikovProduct:
            return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
        case KernelFamily::UniformBox:
            return std::abs(t) <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

double kernel_support_radius(KernelFamily family) {
    return family == KernelFamily::Gaussian ? kGaussianRadius : 1.0;
}

double kernel_base_sup(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian: return 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
        case KernelFamily::EpanechnikovProduct: return 0.75;
        case KernelFamily::UniformBox: return 0.5;
    }
    return 0.0;
}

double evaluate_kernel(const KernelSpec& spec, std::span<const double> u) {
    if (static_cast<int>(u.size()) != spec.dimension)
        throw ParameterError("kernel argument has dimension " + std::to_string(u.size()) +
                             ", expected " + std::to_string(spec.dimension));
    double value = 1.0;
    for (double t : u) {
        if (!std::isfinite(t)) throw DomainError("evaluate_kernel: non-finite coordinate");
        value *= kernel_base(spec.family, t);
    }
    return value;
}

double kernel_square_integral(const KernelSpec& spec) {
    double base = 0.0;
    switch (spec.family) {
        case KernelFamily::Gaussian: base = 0.5 * std::numbers::inv_sqrtpi; break;
        case KernelFamily::EpanechnikovProduct: base = 0.6; break;
        case KernelFamily::UniformBox: base = 0.5; break;
    }
    return std::pow(base, spec.dimension);
}

bool KernelValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

KernelValidationReport validate_kernel(const KernelSpec& spec, double tolerance) {
    if (!(tolerance > 0.0)) throw ParameterError("validate_kernel: tolerance must be positive");
    spec.check();

    KernelValidationReport report;
    report.spec = spec;
    report.tolerance = tolerance;

    const int d = spec.dimension;
    const int s = spec.claimed_order;
    const AxisRule rule = axis_rule(spec.family);
    const std::size_t m = rule.nodes.size();

    const auto indices = multi_indices(d, s);
    std::vector<double> signed_acc(indices.size(), 0.0);
    std::vector<double> abs_acc(indices.size(), 0.0);
    double mass = 0.0;

    // Tensor walk over the quadrature nodes.
    std::vector<std::size_t> pos(d, 0);
    std::vector<double> u(d);
    std::vector<std::vector<double>> powers(d, std::vector<double>(s + 1));
    while (true) {
        double weight = 1.0;
        for (int k = 0; k < d; ++k) {
            u[k] = rule.nodes[pos[k]];
            weight *= rule.weights[pos[k]];
            powers[k][0] = 1.0;
            for (int p = 1; p <= s; ++p) powers[k][p] = powers[k][p - 1] * u[k];
        }
        const double wk = weight * evaluate_kernel(spec, u);
        mass += wk;
        for (std::size_t q = 0; q < indices.size(); ++q) {
            double mono = 1.0;
            for (int k = 0; k < d; ++k) mono *= powers[k][indices[q][k]];
            signed_acc[q] += wk * mono;
            abs_acc[q] += wk * std::abs(mono);
        }
        int k = 0;
        while (k < d) {
            if (++pos[k] < m) break;
            pos[k] = 0;
            ++k;
        }
        if (k == d) break;
    }

    // Probe grid for sup |K| and the sign check.
    const int probes = d == 1 ? 2001 : (d == 2 ? 201 : 61);
    const double reach = kernel_support_radius(spec.family) + 0.5;
    double sup_abs = 0.0;
    double min_value = std::numeric_limits<double>::infinity();
    std::vector<int> ppos(d, 0);
    while (true) {
        for (int k = 0; k < d; ++k) u[k] = -reach + 2.0 * reach * ppos[k] / (probes - 1);
        const double v = evaluate_kernel(spec, u);
        sup_abs = std::max(sup_abs, std::abs(v));
        min_value = std::min(min_value, v);
        int k = 0;
        while (k < d) {
            if (++ppos[k] < probes) break;
            ppos[k] = 0;
            ++k;
        }
        if (k == d) break;
    }

    report.integral = mass;
    report.sup_abs = sup_abs;
    for (std::size_t q = 0; q < indices.size(); ++q)
        report.moments.push_back({indices[q], signed_acc[q], abs_acc[q]});

    const double sup_bound = std::pow(kernel_base_sup(spec.family), d);
    report.checks.push_back({"bounded", std::isfinite(sup_abs) && sup_abs <= sup_bound * (1.0 + 1e-12),
                             sup_abs, "sup |K| over probe grid, family bound " + std::to_string(sup_bound)});
    report.checks.push_back({"unit_mass", std::abs(mass - 1.0) < tolerance, mass, "integral of K"});

    bool order_ok = true;
    double worst_low = 0.0;
    double rho = std::numeric_limits<double>::infinity();
    for (const auto& entry : report.moments) {
        const int deg = total_degree(entry.multi_index);
        if (deg < s) {
            worst_low = std::max(worst_low, std::abs(entry.signed_moment));
            if (std::abs(entry.signed_moment) >= tolerance) order_ok = false;
        } else if (deg == s) {
            rho = std::min(rho, entry.absolute_moment);
        }
    }
    if (!(rho > tolerance)) order_ok = false;
    report.order_constant = rho;
    report.checks.push_back({"moment_order", order_ok, worst_low,
                             "max |moment| of degree 1.." + std::to_string(s - 1) +
                                 ", order constant " + std::to_string(rho)});
    report.checks.push_back({"nonnegative", min_value >= 0.0, min_value, "min K over probe grid"});
    return report;
}

}  // namespace divest
