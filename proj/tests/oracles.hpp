#pragma once

// Reference computations written independently of the library: composite
// Simpson rules, closed forms for Gaussian pairs and brute-force kernel sums.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_pdf(double x, double mu, double sd) {
    const double z = (x - mu) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double simpson(const std::function<double(double)>& fn, double a, double b, int panels = 20000) {
    if (panels % 2) ++panels;
    const double step = (b - a) / panels;
    double acc = fn(a) + fn(b);
    for (int i = 1; i < panels; ++i) acc += fn(a + i * step) * (i % 2 ? 4.0 : 2.0);
    return acc * step / 3.0;
}

inline double simpson2(const std::function<double(double, double)>& fn, double a0, double b0, double a1, double b1,
                       int panels = 400) {
    return simpson([&](double x) { return simpson([&](double y) { return fn(x, y); }, a1, b1, panels); }, a0, b0,
                   panels);
}

/// int N(m1, s1^2)^a N(m2, s2^2)^(1-a) dx in one dimension.
inline double gaussian_dalpha(double m1, double s1, double m2, double s2, double a) {
    const double va = a * s2 * s2 + (1.0 - a) * s1 * s1;
    return std::pow(s1, 1.0 - a) * std::pow(s2, a) / std::sqrt(va) *
           std::exp(-a * (1.0 - a) * (m1 - m2) * (m1 - m2) / (2.0 * va));
}

/// KL(N(m1, s1^2) || N(m2, s2^2)).
inline double gaussian_kl(double m1, double s1, double m2, double s2) {
    return std::log(s2 / s1) + (s1 * s1 + (m1 - m2) * (m1 - m2)) / (2.0 * s2 * s2) - 0.5;
}

inline double renyi(double d, double a) { return std::log(d) / (a - 1.0); }
inline double tsallis(double d, double a) { return (d - 1.0) / (a - 1.0); }

inline double gaussian_kernel(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }
inline double epanechnikov_kernel(double t) { return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0; }
inline double box_kernel(double t) { return std::abs(t) <= 1.0 ? 0.5 : 0.0; }

/// 1/(n h^d) sum_i prod_k k((x_k - X_ik)/h), summed over every row.
inline double brute_kde(const std::vector<double>& rows, int d, double h, const std::vector<double>& x,
                        double (*k)(double)) {
    const std::size_t n = rows.size() / d;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int j = 0; j < d; ++j) prod *= k((x[j] - rows[i * d + j]) / h);
        acc += prod;
    }
    return acc / (static_cast<double>(n) * std::pow(h, d));
}

}  // namespace oracle
