#include "divest/cli.hpp"

#include "divest/confidence.hpp"
#include "divest/config.hpp"
#include "divest/error.hpp"
#include "divest/kde.hpp"
#include "divest/rng.hpp"
#include "divest/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

namespace divest {

using nlohmann::json;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(std::size_t x) { return std::to_string(x); }

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

ExperimentConfig load(const CommonOptions& opts) {
    if (opts.config_path.empty()) throw ConfigError("--config is required");
    ExperimentConfig c = load_config(opts.config_path);
    if (opts.seed) c.seed = *opts.seed;
    if (!opts.out_dir.empty()) c.output_dir = opts.out_dir;
    return c;
}

std::filesystem::path prepare_dir(const ExperimentConfig& c) {
    std::filesystem::path dir(c.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.output_dir + ": " + ec.message());
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
}

json estimate_json(const DivergenceEstimate& e) {
    json j{{"d_alpha", number_or_null(e.d_alpha)},
           {"renyi", number_or_null(e.renyi)},
           {"tsallis", number_or_null(e.tsallis)},
           {"mass_below_threshold", e.mass_below_threshold},
           {"out_of_range_warning", e.out_of_range_warning}};
    if (e.mc_std_error) j["mc_std_error"] = *e.mc_std_error;
    return j;
}

int cmd_estimate(const CommonOptions& opts, std::ostream& out) {
    const ExperimentConfig c = load(opts);
    const AnalyticDensity f = c.f(), g = c.g();
    const EvaluationGrid grid = c.grid();
    const std::size_t n = c.estimate.n;
    const double h = c.estimate.h.value_or(ExperimentConfig::midpoint_bandwidth(c.range, n));
    const double gamma = c.thresholds.at(n);
    const std::uint64_t sample_seed = derive_seed(c.seed, 0, n);
    const std::uint64_t mc_seed = derive_seed(c.seed, 1, n);

    const SampleMatrix sample = f.draw_sample(n, sample_seed);
    const KernelDensityEstimate kde(sample, c.kernel, h);
    const auto fhat = kde.on_grid(grid, opts.threads);
    const auto g_values = density_on_grid(g, grid);
    const DensityEvaluator eval = [&kde](std::span<const double> x) { return kde(x); };

    json report;
    report["command"] = "estimate";
    report["config"] = materialize(c);
    report["n"] = n;
    report["h"] = h;
    report["gamma"] = gamma;
    report["sample_seed"] = sample_seed;
    report["mc_seed"] = mc_seed;

    json by_alpha = json::array();
    for (double a : c.alphas) {
        const AlphaParam alpha(a);
        const auto truth = true_divergences(f, g, a);
        const auto quad = dalpha_quadrature(fhat, g_values, alpha, gamma, grid);
        const auto mc = dalpha_monte_carlo(eval, g, alpha, gamma, c.mc_samples, mc_seed, opts.threads);
        by_alpha.push_back({{"alpha", a},
                            {"quadrature", estimate_json(quad)},
                            {"monte_carlo", estimate_json(mc)},
                            {"truth",
                             {{"d_alpha", truth.d_alpha},
                              {"renyi", number_or_null(truth.renyi)},
                              {"tsallis", truth.tsallis}}}});
    }
    report["alpha_family"] = by_alpha;

    const AlphaParam half(0.5);
    const auto truth_half = true_divergences(f, g, 0.5);
    const auto quad_half = dalpha_quadrature(fhat, g_values, half, gamma, grid);
    const auto mc_half = dalpha_monte_carlo(eval, g, half, gamma, c.mc_samples, mc_seed, opts.threads);
    auto half_json = [](const DivergenceEstimate& e) {
        json j{{"d_half", e.d_alpha},
               {"hellinger", hellinger_estimate(e)},
               {"bhattacharyya", number_or_null(bhattacharyya_estimate(e))},
               {"mass_below_threshold", e.mass_below_threshold}};
        if (e.mc_std_error) j["mc_std_error"] = *e.mc_std_error;
        return j;
    };
    report["half_order"] = {{"quadrature", half_json(quad_half)},
                            {"monte_carlo", half_json(mc_half)},
                            {"truth",
                             {{"d_half", truth_half.d_alpha},
                              {"hellinger", truth_half.hellinger},
                              {"bhattacharyya", number_or_null(truth_half.bhattacharyya)}}}};

    const auto kl_mc = kl_monte_carlo(eval, g, gamma, c.mc_samples, mc_seed, opts.threads);
    report["kl"] = {{"quadrature", {{"value", kl_plugin(fhat, g_values, gamma, grid)}}},
                    {"monte_carlo", {{"value", kl_mc.value}, {"mc_std_error", kl_mc.std_error}}},
                    {"truth", number_or_null(truth_half.kl)}};

    const auto path = prepare_dir(c) / "estimate.json";
    write_file(path, report.dump(2) + "\n");
    out << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, std::ostream& out) {
    const ExperimentConfig c = load(opts);
    const double a = c.alphas.front();
    SweepConfig sc{c.f(), c.g(), a, c.kernel, c.range, c.thresholds, c.n_schedule, c.replications,
                   c.seed, c.grid(), opts.threads};
    const SweepResult result = run_sweep(sc);
    const RateFit fit = fit_rate(result);

    std::string csv = "replication,n,h,d_alpha,err_dalpha,err_renyi,err_tsallis,delta1,delta2,delta3,rate_bound\n";
    std::size_t violations = 0;
    for (const auto& cell : result.cells) {
        csv += fmt(cell.replication) + "," + fmt(cell.n) + "," + fmt(cell.h) + "," + fmt(cell.d_alpha) + "," +
               fmt(cell.err_dalpha) + "," + fmt(cell.err_renyi) + "," + fmt(cell.err_tsallis) + "," +
               fmt(cell.decomposition.delta1) + "," + fmt(cell.decomposition.delta2) + "," +
               fmt(cell.decomposition.delta3) + "," + fmt(cell.rate_bound) + "\n";
        if (!check_decomposition_bounds(cell, a).all()) ++violations;
    }

    json per_n = json::array();
    for (const auto& s : result.per_n)
        per_n.push_back({{"n", s.n},
                         {"h_lower", s.h_lower},
                         {"h_upper", s.h_upper},
                         {"gamma", s.gamma},
                         {"rate_bound", s.rate_bound},
                         {"mean_sup_err_dalpha", s.mean_sup_err_dalpha},
                         {"mean_sup_err_renyi", s.mean_sup_err_renyi},
                         {"mean_sup_err_tsallis", s.mean_sup_err_tsallis}});
    json fit_json{{"defined", fit.defined},
                  {"fitted_exponent", fit.defined ? json(fit.fitted_exponent) : json(nullptr)},
                  {"theoretical_exponent", fit.theoretical_exponent},
                  {"r_squared", fit.defined ? json(fit.r_squared) : json(nullptr)},
                  {"error_measure", "mean over replications of sup over bandwidths of |d_alpha error|"},
                  {"note", "theoretical exponent omits logarithmic factors"}};
    if (!fit.defined) fit_json["reason"] = fit.reason;
    json report{{"command", "sweep"},
                {"config", materialize(c)},
                {"alpha", a},
                {"truth", {{"d_alpha", result.truth.d_alpha},
                           {"renyi", number_or_null(result.truth.renyi)},
                           {"tsallis", result.truth.tsallis}}},
                {"per_n", per_n},
                {"fit", fit_json},
                {"bound_violations", violations}};

    const auto dir = prepare_dir(c);
    write_file(dir / "sweep.csv", csv);
    write_file(dir / "rate_fit.json", report.dump(2) + "\n");
    out << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "rate_fit.json").string() << "\n";
    return kExitOk;
}

int cmd_ci(const CommonOptions& opts, std::ostream& out) {
    const ExperimentConfig c = load(opts);
    const double a = c.alphas.front();
    const double h = c.ci.h.value_or(ExperimentConfig::midpoint_bandwidth(c.range, c.ci.n));
    CoverageConfig cc{c.f(), c.g(), a, c.kernel, c.thresholds, c.ci.n, h, c.ci.gamma_floor, c.ci.epsilon,
                      c.ci.replications, c.seed, c.grid(), opts.threads};
    const CoverageResult result = run_coverage(cc);

    std::string csv = "kind,n,h,alpha,estimate,half_width,lower,upper,true_value,covered\n";
    auto row = [&](const CertaintyInterval& iv, double truth, bool covered) {
        csv += std::string(interval_kind_name(iv.kind)) + "," + fmt(iv.n) + "," + fmt(iv.h) + "," + fmt(iv.alpha) +
               "," + fmt(iv.center) + "," + fmt(iv.half_width) + "," + fmt(iv.lower()) + "," + fmt(iv.upper()) +
               "," + fmt(truth) + "," + (covered ? "true" : "false") + "\n";
    };
    for (const auto& r : result.rows) {
        row(r.tsallis, result.truth.tsallis, r.tsallis_covered);
        row(r.renyi, result.truth.renyi, r.renyi_covered);
    }
    // Summary rows: means of the interval columns; `covered` holds the covered fraction.
    auto summary = [&](const char* kind, bool tsallis, double truth, double coverage) {
        double center = 0.0, hw = 0.0;
        for (const auto& r : result.rows) {
            const auto& iv = tsallis ? r.tsallis : r.renyi;
            center += iv.center;
            hw += iv.half_width;
        }
        const double m = static_cast<double>(result.rows.size());
        center /= m;
        hw /= m;
        csv += std::string(kind) + "," + fmt(c.ci.n) + "," + fmt(h) + "," + fmt(a) + "," + fmt(center) + "," +
               fmt(hw) + "," + fmt(center - hw) + "," + fmt(center + hw) + "," + fmt(truth) + "," + fmt(coverage) +
               "\n";
    };
    summary("summary_tsallis", true, result.truth.tsallis, result.tsallis_coverage);
    summary("summary_renyi", false, result.truth.renyi, result.renyi_coverage);

    json zetas = json::array();
    for (const auto& r : result.rows) zetas.push_back(r.zeta.value);
    json report{{"command", "ci"},
                {"config", materialize(c)},
                {"alpha", a},
                {"n", c.ci.n},
                {"h", h},
                {"gamma_floor", result.gamma_floor},
                {"g_power_integral", result.g_integral},
                {"truth", {{"tsallis", result.truth.tsallis}, {"renyi", number_or_null(result.truth.renyi)}}},
                {"tsallis_coverage", result.tsallis_coverage},
                {"renyi_coverage", result.renyi_coverage},
                {"zeta", zetas}};

    const auto dir = prepare_dir(c);
    write_file(dir / "intervals.csv", csv);
    write_file(dir / "ci_summary.json", report.dump(2) + "\n");
    out << "wrote " << (dir / "intervals.csv").string() << " (tsallis coverage " << fmt(result.tsallis_coverage)
        << ", renyi coverage " << fmt(result.renyi_coverage) << ")\n";
    return kExitOk;
}

int cmd_validate_kernel(const std::string& family, int order, int dimension, double tolerance, std::ostream& out) {
    KernelSpec spec;
    try {
        spec.family = kernel_family_from_name(family);
        spec.dimension = dimension;
        spec.claimed_order = order;
        spec.check();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const auto report = validate_kernel(spec, tolerance);
    out << "kernel " << kernel_family_name(spec.family) << " d=" << spec.dimension << " order=" << spec.claimed_order
        << " tolerance=" << fmt(tolerance) << "\n";
    out << "integral " << fmt(report.integral) << "\n";
    out << "sup_abs " << fmt(report.sup_abs) << "\n";
    out << "order_constant " << fmt(report.order_constant) << "\n";
    for (const auto& m : report.moments) {
        out << "moment (";
        for (std::size_t i = 0; i < m.multi_index.size(); ++i) out << (i ? "," : "") << m.multi_index[i];
        out << ") signed " << fmt(m.signed_moment) << " absolute " << fmt(m.absolute_moment) << "\n";
    }
    for (const auto& chk : report.checks)
        out << (chk.passed ? "PASS " : "FAIL ") << chk.condition << " measured " << fmt(chk.measured) << " ("
            << chk.detail << ")\n";
    out << (report.all_passed() ? "kernel valid" : "kernel INVALID") << "\n";
    return report.all_passed() ? kExitOk : kExitValidationFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel plug-in divergence estimation experiments"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::uint64_t seed_value = 0;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "JSON experiment config")->required();
        cmd->add_option("--out", opts.out_dir, "output directory (overrides output_dir)");
        cmd->add_option("--threads", opts.threads, "worker threads")->check(CLI::Range(1u, 1024u));
        cmd->add_option("--seed", seed_value, "override the config seed");
    };
    auto* estimate = app.add_subcommand("estimate", "estimate all divergences from one sample");
    auto* sweep = app.add_subcommand("sweep", "bandwidth sweep with error decomposition and rate fit");
    auto* ci = app.add_subcommand("ci", "certainty intervals and their coverage");
    for (auto* cmd : {estimate, sweep, ci}) add_common(cmd);

    std::string family = "gaussian";
    int order = 2, dimension = 1;
    double tolerance = 1e-6;
    auto* vk = app.add_subcommand("validate-kernel", "numeric checks of a kernel family");
    vk->add_option("--family", family, "gaussian | epanechnikov | box");
    vk->add_option("--order", order, "claimed order s");
    vk->add_option("--dimension", dimension, "dimension d in 1..3");
    vk->add_option("--tolerance", tolerance, "moment tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    for (auto* cmd : {estimate, sweep, ci})
        if (cmd->parsed() && cmd->count("--seed") > 0) opts.seed = seed_value;

    try {
        if (estimate->parsed()) return cmd_estimate(opts, out);
        if (sweep->parsed()) return cmd_sweep(opts, out);
        if (ci->parsed()) return cmd_ci(opts, out);
        return cmd_validate_kernel(family, order, dimension, tolerance, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumericFailure;
    } catch (const DomainError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumericFailure;
    }
}

}  // namespace divest
