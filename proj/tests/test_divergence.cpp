#include <doctest.h>

#include "divest/divergence.hpp"
#include "divest/error.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace divest;

TEST_CASE("alpha and threshold validation") {
    CHECK_THROWS_AS(AlphaParam(0.0), ParameterError);
    CHECK_THROWS_AS(AlphaParam(1.0), ParameterError);
    CHECK_NOTHROW(AlphaParam(0.999));
    ThresholdSchedule t;
    CHECK(t.at(100) == doctest::Approx(0.01 / std::log(100.0)));
    CHECK_THROWS_AS(t.at(1), ParameterError);
    ThresholdSchedule bad{-1.0, 1.0};
    CHECK_THROWS_AS(bad.check(), ParameterError);
}

TEST_CASE("quadrature on exact density values reproduces the closed form") {
    const auto f = AnalyticDensity::gaussian({0.0}, {1.0});
    const auto g = AnalyticDensity::gaussian({1.0}, {1.0});
    const EvaluationGrid grid({-10.0}, {11.0}, 4001);
    const auto fv = density_on_grid(f, grid);
    const auto gv = density_on_grid(g, grid);
    for (double a : {0.25, 0.5, 0.75}) {
        const auto est = dalpha_quadrature(fv, gv, AlphaParam(a), 0.0, grid);
        const double d = oracle::gaussian_dalpha(0, 1, 1, 1, a);
        CHECK(est.d_alpha == doctest::Approx(d).epsilon(1e-10));
        CHECK(est.renyi == doctest::Approx(oracle::renyi(d, a)).epsilon(1e-9));
        CHECK(est.tsallis == doctest::Approx(oracle::tsallis(d, a)).epsilon(1e-9));
        CHECK_FALSE(est.out_of_range_warning);
        CHECK(est.mass_below_threshold == 0.0);
    }
    CHECK(kl_plugin(fv, gv, 0.0, grid) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("threshold excludes low-density nodes and reports their g-mass") {
    const auto g = AnalyticDensity::uniform_box({0.0}, {1.0});
    const EvaluationGrid grid({0.0}, {1.0}, 101);
    std::vector<double> fv(grid.size()), gv(grid.size(), 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) fv[i] = i < 50 ? 0.001 : 1.999;
    const auto est = dalpha_quadrature(fv, gv, AlphaParam(0.5), 0.01, grid);
    CHECK(est.mass_below_threshold == doctest::Approx(0.495));
    CHECK(est.d_alpha == doctest::Approx(std::sqrt(1.999) * 0.505));
    const auto region = threshold_region(fv, 0.01);
    CHECK(region[49] == false);
    CHECK(region[50] == true);
    (void)g;
}

TEST_CASE("d_alpha above one raises a warning without clamping") {
    const EvaluationGrid grid({0.0}, {1.0}, 11);
    std::vector<double> fv(grid.size(), 3.0), gv(grid.size(), 1.0);
    const auto est = dalpha_quadrature(fv, gv, AlphaParam(0.5), 0.0, grid);
    CHECK(est.d_alpha == doctest::Approx(std::sqrt(3.0)));
    CHECK(est.out_of_range_warning);
    const auto zero = make_estimate(0.0, AlphaParam(0.5), IntegrationMethod::Quadrature, 0.0);
    CHECK(std::isinf(zero.renyi));
    CHECK(std::isinf(bhattacharyya_estimate(zero)));
}

TEST_CASE("derived measures obey their identities") {
    for (double d : {0.2, 0.55, 0.93, 0.999}) {
        const auto est = make_estimate(d, AlphaParam(0.5), IntegrationMethod::Quadrature, 0.0);
        const double h = hellinger_estimate(est);
        const double b = bhattacharyya_estimate(est);
        CHECK(std::abs(est.renyi - 2.0 * b) < 1e-12);
        CHECK(std::abs(b + std::log(1.0 - h)) < 1e-12);
    }
    const auto other = make_estimate(0.9, AlphaParam(0.3), IntegrationMethod::Quadrature, 0.0);
    CHECK_THROWS_AS(hellinger_estimate(other), ParameterError);
}

TEST_CASE("Monte Carlo integral is reproducible and thread independent") {
    const auto f = AnalyticDensity::gaussian({0.0}, {1.0});
    const auto g = AnalyticDensity::gaussian({0.5}, {1.2});
    const DensityEvaluator exact = [&](std::span<const double> x) { return f.density(x); };
    const auto a = dalpha_monte_carlo(exact, g, AlphaParam(0.5), 0.0, 50000, 99, 1);
    const auto b = dalpha_monte_carlo(exact, g, AlphaParam(0.5), 0.0, 50000, 99, 3);
    CHECK(a.d_alpha == b.d_alpha);
    CHECK(*a.mc_std_error == *b.mc_std_error);
    const double d = oracle::gaussian_dalpha(0, 1, 0.5, 1.2, 0.5);
    CHECK(std::abs(a.d_alpha - d) < 4.0 * *a.mc_std_error);
    const auto kl = kl_monte_carlo(exact, g, 0.0, 50000, 99, 2);
    CHECK(std::abs(kl.value - oracle::gaussian_kl(0, 1, 0.5, 1.2)) < 4.0 * kl.std_error);
    CHECK_THROWS_AS(dalpha_monte_carlo(exact, g, AlphaParam(0.5), 0.0, 1, 99, 1), ParameterError);
}

TEST_CASE("quadrature and Monte Carlo agree on a plug-in estimate") {
    const auto f = AnalyticDensity::mixture({0.5, 0.5}, {{-1.0}, {1.0}}, {{0.8}, {0.8}});
    const auto g = AnalyticDensity::gaussian({0.0}, {1.5});
    const auto sample = f.draw_sample(1000, 4);
    const KernelSpec spec{KernelFamily::Gaussian, 1, 2};
    const KernelDensityEstimate kde(sample, spec, 0.25);
    const DensityEvaluator eval = [&](std::span<const double> x) { return kde(x); };
    const EvaluationGrid grid({-12.0}, {12.0}, 4001);
    const double gamma = ThresholdSchedule{}.at(1000);
    const auto q = dalpha_quadrature(eval, g, AlphaParam(0.5), gamma, grid);
    const auto m = dalpha_monte_carlo(eval, g, AlphaParam(0.5), gamma, 100000, 8, 1);
    CHECK(std::abs(q.d_alpha - m.d_alpha) <= 3.0 * *m.mc_std_error + 1e-3);
}

TEST_CASE("centered expectation and power integrals") {
    const EvaluationGrid grid({0.0}, {2.0}, 201);
    std::vector<double> s(grid.size(), 0.25), gv(grid.size(), 0.5);
    std::vector<bool> region(grid.size(), true);
    for (std::size_t i = 0; i < 100; ++i) region[i] = false;
    // Nodes 100..200 cover [1, 2]; only node 200 carries a half weight.
    const double value = centered_expectation_dalpha(s, gv, AlphaParam(0.5), region, grid);
    CHECK(value == doctest::Approx(std::sqrt(0.125) * (1.0 + 0.005)));
    CHECK(grid_power_integral(gv, 0.5, grid) == doctest::Approx(2.0 * std::sqrt(0.5)));
    std::vector<bool> short_region(3, true);
    CHECK_THROWS_AS(centered_expectation_dalpha(s, gv, AlphaParam(0.5), short_region, grid), ParameterError);
}

TEST_CASE("identical densities give unit d_alpha") {
    const auto g = AnalyticDensity::gaussian({0.0}, {1.0});
    const EvaluationGrid grid({-10.0}, {10.0}, 2001);
    const auto gv = density_on_grid(g, grid);
    for (double a : {0.1, 0.5, 0.9}) {
        const auto est = dalpha_quadrature(gv, gv, AlphaParam(a), 0.0, grid);
        CHECK(std::abs(est.d_alpha - 1.0) < 1e-4);
        CHECK(std::abs(est.renyi) < 1e-4);
        CHECK(std::abs(est.tsallis) < 1e-4);
    }
    CHECK(std::abs(kl_plugin(gv, gv, 0.0, grid)) < 1e-12);
    const std::vector<bool> all(grid.size(), true);
    const double centered =
        centered_expectation_dalpha(g, g, {KernelFamily::Gaussian, 1, 2}, 1e-3, AlphaParam(0.5), all, grid);
    CHECK(std::abs(centered - 1.0) < 1e-3);
}
