#include "divest/confidence.hpp"

#include "divest/error.hpp"
#include "divest/kde.hpp"
#include "divest/parallel.hpp"
#include "divest/rng.hpp"

#include <algorithm>
#include <cmath>

namespace divest {

ZetaEstimate estimate_zeta(std::span<const double> fhat_values, double k_square_integral, AlphaParam alpha) {
    if (fhat_values.empty()) throw ParameterError("estimate_zeta: region I_n has no nodes");
    if (!(k_square_integral > 0.0)) throw ParameterError("estimate_zeta: int K^2 must be positive");
    double top = 0.0;
    for (double v : fhat_values) {
        if (!(v >= 0.0)) throw ParameterError("estimate_zeta: density values must be nonnegative");
        top = std::max(top, v);
    }
    ZetaEstimate z;
    z.value = std::pow(top * k_square_integral, alpha.value() / 2.0);
    z.region_nodes = fhat_values.size();
    z.k_square_integral = k_square_integral;
    z.alpha = alpha.value();
    return z;
}

double oracle_zeta(const AnalyticDensity& f, double k_square_integral, AlphaParam alpha) {
    return std::pow(f.sup_density() * k_square_integral, alpha.value() / 2.0);
}

HalfWidths compute_half_widths(const ZetaEstimate& zeta, std::size_t n, double h, AlphaParam alpha,
                               double g_integral, double gamma_floor) {
    if (n < 3) throw ParameterError("compute_half_widths: n must be >= 3 so that log log n > 0");
    if (!(h > 0.0 && h < 1.0)) throw ParameterError("compute_half_widths: h must lie in (0, 1)");
    if (!(gamma_floor > 0.0)) throw ParameterError("compute_half_widths: gamma_floor must be positive");
    if (!(g_integral > 0.0) || !std::isfinite(g_integral))
        throw ParameterError("compute_half_widths: int g^(1-a) must be positive and finite");
    const double a = alpha.value();
    const double nn = static_cast<double>(n);
    const double num = std::max(std::log(1.0 / h), std::log(std::log(nn)));
    HalfWidths w;
    w.rate = std::pow(num / (nn * h), a / 2.0);
    w.b_tsallis = zeta.value * g_integral * w.rate / (1.0 - a);
    w.b_renyi = zeta.value * w.rate / ((1.0 - a) * std::pow(gamma_floor, a));
    return w;
}

std::string_view interval_kind_name(IntervalKind kind) {
    return kind == IntervalKind::Tsallis ? "tsallis" : "renyi";
}

std::pair<CertaintyInterval, CertaintyInterval> build_intervals(double tsallis_est, double renyi_est,
                                                                const HalfWidths& widths, double epsilon) {
    if (!std::isfinite(widths.b_tsallis) || !std::isfinite(widths.b_renyi) || widths.b_tsallis < 0.0 ||
        widths.b_renyi < 0.0)
        throw ParameterError("build_intervals: half-widths must be finite and nonnegative");
    if (!(epsilon >= 0.0)) throw ParameterError("build_intervals: epsilon must be nonnegative");
    CertaintyInterval t, r;
    t.kind = IntervalKind::Tsallis;
    t.center = tsallis_est;
    t.half_width = widths.b_tsallis * (1.0 + epsilon);
    r.kind = IntervalKind::Renyi;
    r.center = renyi_est;
    r.half_width = widths.b_renyi * (1.0 + epsilon);
    return {t, r};
}

double resolve_gamma_floor(const AnalyticDensity& f, const std::optional<double>& explicit_floor) {
    if (explicit_floor) {
        if (!(*explicit_floor > 0.0)) throw ConfigError("gamma_floor must be positive");
        return *explicit_floor;
    }
    if (f.support_floor()) return *f.support_floor();
    throw ConfigError("gamma_floor is required: f has no compact support with a recorded density floor");
}

CoverageResult run_coverage(const CoverageConfig& config) {
    const AlphaParam alpha(config.alpha);
    const double a = alpha.value();
    config.kernel.check();
    config.thresholds.check();
    if (config.n < 3) throw ConfigError("coverage needs n >= 3 (log log n must be defined and positive)");
    if (!(config.h > 0.0 && config.h < 1.0)) throw ConfigError("coverage bandwidth must lie in (0, 1)");
    if (config.replications < 1) throw ConfigError("replications must be >= 1");

    CoverageResult result;
    result.truth = true_divergences(config.f, config.g, a);
    result.gamma_floor = resolve_gamma_floor(config.f, config.gamma_floor);
    const auto g_values = density_on_grid(config.g, config.grid);
    result.g_integral = grid_power_integral(g_values, 1.0 - a, config.grid);
    const double k2 = kernel_square_integral(config.kernel);
    const double gamma = config.thresholds.at(config.n);

    result.rows.resize(config.replications);
    parallel_for(config.replications, config.threads, [&](std::size_t rep) {
        const SampleMatrix sample = config.f.draw_sample(config.n, derive_seed(config.seed, rep, config.n));
        const auto fhat = KernelDensityEstimate(sample, config.kernel, config.h).on_grid(config.grid, 1);
        const auto est = dalpha_quadrature(fhat, g_values, alpha, gamma, config.grid);

        // I_n: nodes where fhat clears the threshold.
        std::vector<double> region_values;
        for (double v : fhat)
            if (v >= gamma) region_values.push_back(v);
        if (region_values.empty()) region_values = fhat;

        CoverageRow row;
        row.replication = rep;
        row.zeta = estimate_zeta(region_values, k2, alpha);
        const auto widths =
            compute_half_widths(row.zeta, config.n, config.h, alpha, result.g_integral, result.gamma_floor);
        auto [t, r] = build_intervals(est.tsallis, est.renyi, widths, config.epsilon);
        for (auto* iv : {&t, &r}) {
            iv->n = config.n;
            iv->h = config.h;
            iv->alpha = a;
            iv->gamma_floor = result.gamma_floor;
        }
        row.tsallis = t;
        row.renyi = r;
        row.tsallis_covered = t.contains(result.truth.tsallis);
        row.renyi_covered = r.contains(result.truth.renyi);
        result.rows[rep] = row;
    });

    std::size_t ct = 0, cr = 0;
    for (const auto& row : result.rows) {
        ct += row.tsallis_covered;
        cr += row.renyi_covered;
    }
    result.tsallis_coverage = static_cast<double>(ct) / static_cast<double>(config.replications);
    result.renyi_coverage = static_cast<double>(cr) / static_cast<double>(config.replications);
    return result;
}

std::vector<ZetaTrendPoint> zeta_trend(const AnalyticDensity& f, const KernelSpec& kernel, double alpha_value,
                                       const BandwidthRange& range, const ThresholdSchedule& thresholds,
                                       const std::vector<std::size_t>& n_schedule, std::size_t replications,
                                       std::uint64_t seed, const EvaluationGrid& grid, unsigned threads) {
    const AlphaParam alpha(alpha_value);
    range.check_feasible(n_schedule);
    if (replications < 1) throw ConfigError("replications must be >= 1");
    const double k2 = kernel_square_integral(kernel);
    const double truth = oracle_zeta(f, k2, alpha);

    std::vector<ZetaTrendPoint> out;
    for (std::size_t n : n_schedule) {
        const double h = std::sqrt(range.lower(n) * range.upper(n));
        const double gamma = thresholds.at(n);
        std::vector<double> zetas(replications);
        parallel_for(replications, threads, [&](std::size_t rep) {
            const SampleMatrix sample = f.draw_sample(n, derive_seed(seed, rep, n));
            const auto fhat = KernelDensityEstimate(sample, kernel, h).on_grid(grid, 1);
            std::vector<double> region;
            for (double v : fhat)
                if (v >= gamma) region.push_back(v);
            if (region.empty()) region = fhat;
            zetas[rep] = estimate_zeta(region, k2, alpha).value;
        });
        ZetaTrendPoint p;
        p.n = n;
        p.h = h;
        for (double z : zetas) {
            p.mean_zeta += z;
            p.mean_abs_error += std::abs(z - truth);
        }
        p.mean_zeta /= static_cast<double>(replications);
        p.mean_abs_error /= static_cast<double>(replications);
        out.push_back(p);
    }
    return out;
}

std::size_t count_inversions(const std::vector<double>& values) {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (values[i + 1] >= values[i]) ++inversions;
    return inversions;
}

}  // namespace divest
