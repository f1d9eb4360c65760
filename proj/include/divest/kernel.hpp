#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divest {

// =============================================================================
// Kernel toolkit
// =============================================================================
//
// Product kernels K(u) = prod_j k(u_j) built from a symmetric univariate base.
// Bounded variation, right continuity and the entropy/measurability conditions
// hold by construction for every shipped family; boundedness, unit mass and
// moment order are checked numerically by validate_kernel().

enum class KernelFamily {
    Gaussian,             ///< standard normal density
    EpanechnikovProduct,  ///< 3/4 (1 - u^2) on [-1, 1]
    UniformBox,           ///< 1/2 on [-1, 1]
};

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    int dimension = 1;
    int claimed_order = 2;

    /// Throws ParameterError unless 1 <= dimension <= 3 and claimed_order >= 2.
    void check() const;
};

/// Parses "gaussian" | "epanechnikov" | "box"; throws ParameterError otherwise.
KernelFamily kernel_family_from_name(std::string_view name);
std::string_view kernel_family_name(KernelFamily family);

/// Univariate base kernel k(t).
double kernel_base(KernelFamily family, double t);

/// Radius outside which the base kernel is (numerically) zero. Gaussian is
/// truncated at 8 standard units for quadrature; the discarded mass is < 1e-14.
double kernel_support_radius(KernelFamily family);

/// sup_t |k(t)|.
double kernel_base_sup(KernelFamily family);

/// K(u) for u in R^d; throws DomainError on non-finite input.
double evaluate_kernel(const KernelSpec& spec, std::span<const double> u);

/// Closed-form integral of K^2 over R^d.
double kernel_square_integral(const KernelSpec& spec);

struct ConditionCheck {
    std::string condition;  ///< "bounded", "unit_mass", "moment_order", "nonnegative"
    bool passed = false;
    double measured = 0.0;
    std::string detail;
};

struct MomentEntry {
    std::vector<int> multi_index;
    double signed_moment = 0.0;    ///< int u^j K(u) du
    double absolute_moment = 0.0;  ///< int |u^j| K(u) du
};

struct KernelValidationReport {
    KernelSpec spec;
    double tolerance = 0.0;
    double integral = 0.0;     ///< measured int K
    double sup_abs = 0.0;      ///< max |K| over the probe grid
    double order_constant = 0.0;  ///< smallest degree-s absolute moment
    std::vector<MomentEntry> moments;  ///< all multi-indices with 1 <= |j| <= s
    std::vector<ConditionCheck> checks;

    bool all_passed() const;
};

/// Measures int K, sup |K| and the moments up to total degree s by tensor
/// Gauss-Legendre quadrature over the kernel's effective support.
KernelValidationReport validate_kernel(const KernelSpec& spec, double tolerance);

}  // namespace divest
