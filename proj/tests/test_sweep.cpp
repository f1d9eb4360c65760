#include <doctest.h>

#include "divest/error.hpp"
#include "divest/kde.hpp"
#include "divest/sweep.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace divest;

TEST_CASE("bandwidth range endpoints") {
    const auto r = BandwidthRange::default_for(1);
    CHECK(r.exponent_lower == doctest::Approx(1.0 / 3.0));
    CHECK(r.exponent_upper == doctest::Approx(0.2));
    const double n = 2000.0;
    CHECK(r.lower(2000) == doctest::Approx(0.15 * std::pow(std::log(n) / n, 1.0 / 3.0)));
    CHECK(r.upper(2000) == doctest::Approx(2.0 * std::pow(n, -0.2)));
    CHECK(r.upper(3) == 1.0);
    const auto r2 = BandwidthRange::default_for(2);
    CHECK(r2.exponent_lower == doctest::Approx(0.25));
    CHECK(r2.exponent_upper == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("bandwidth grid is geometric") {
    const auto r = BandwidthRange::default_for(1);
    const auto hs = r.bandwidths(8000);
    REQUIRE(hs.size() == 12);
    CHECK(hs.front() == doctest::Approx(r.lower(8000)));
    CHECK(hs.back() == doctest::Approx(r.upper(8000)));
    for (std::size_t i = 1; i + 1 < hs.size(); ++i)
        CHECK(hs[i] / hs[i - 1] == doctest::Approx(hs[i + 1] / hs[i]).epsilon(1e-12));
    BandwidthRange single = r;
    single.grid_size = 1;
    const auto mid = single.bandwidths(8000);
    REQUIRE(mid.size() == 1);
    CHECK(mid[0] == doctest::Approx(std::sqrt(r.lower(8000) * r.upper(8000))));
}

TEST_CASE("infeasible ranges are configuration errors") {
    auto r = BandwidthRange::default_for(1);
    CHECK_NOTHROW(r.check_feasible({500, 2000, 8000}));
    CHECK_THROWS_AS(r.check_feasible({2}), ConfigError);
    r.c_lower = 50.0;
    CHECK_THROWS_AS(r.check_feasible({500}), ConfigError);
}

TEST_CASE("rate envelope picks the largest term") {
    const double n = 1000.0, hl = 0.05, hu = 0.4, gamma = 0.001, a = 0.5;
    const double stochastic = std::pow(std::max(std::log(1.0 / hl), std::log(std::log(n))) / (n * hl), a / 2.0);
    const double expected = std::max({stochastic, std::pow(gamma, a), std::pow(hu, a / 1.0)});
    CHECK(rate_envelope(1000, hl, hu, gamma, a, 1) == doctest::Approx(expected));
}

TEST_CASE("decomposition adds up exactly") {
    const auto f = AnalyticDensity::gaussian({0.0}, {1.0});
    const auto g = AnalyticDensity::gaussian({1.0}, {1.0});
    const KernelSpec spec{KernelFamily::Gaussian, 1, 2};
    const EvaluationGrid grid({-9.0}, {11.0}, 2001);
    const auto sample = f.draw_sample(800, 21);
    const double gamma = ThresholdSchedule{}.at(800);
    const auto dec = decompose_error(sample, f, g, spec, 0.2, AlphaParam(0.5), gamma, grid);
    CHECK(dec.delta1 + dec.delta2 + dec.delta3 == doctest::Approx(dec.d_alpha_hat - dec.d_alpha_grid).epsilon(1e-12));
    CHECK(dec.d_alpha_grid == doctest::Approx(oracle::gaussian_dalpha(0, 1, 1, 1, 0.5)).epsilon(1e-9));
    CHECK(dec.delta3 <= 0.0);
}

TEST_CASE("sweep is deterministic and thread independent") {
    SweepConfig config{AnalyticDensity::gaussian({0.0}, {1.0}),
                       AnalyticDensity::gaussian({1.0}, {1.0}),
                       0.5,
                       {KernelFamily::Gaussian, 1, 2},
                       BandwidthRange::default_for(1),
                       {},
                       {200, 400, 800},
                       3,
                       17,
                       EvaluationGrid({-9.0}, {11.0}, 1201),
                       1};
    config.range.grid_size = 4;
    const auto a = run_sweep(config);
    config.threads = 3;
    const auto b = run_sweep(config);
    REQUIRE(a.cells.size() == 3 * 3 * 4);
    REQUIRE(b.cells.size() == a.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].d_alpha == b.cells[i].d_alpha);
        CHECK(a.cells[i].decomposition.delta1 == b.cells[i].decomposition.delta1);
    }
    CHECK(a.cells[5].replication == 0);
    CHECK(a.cells[5].n == 400);
    CHECK(a.per_n.size() == 3);
    for (const auto& cell : a.cells) CHECK(check_decomposition_bounds(cell, 0.5).all());
}

TEST_CASE("rate fit on an exact power law") {
    const std::vector<std::size_t> ns{100, 1000, 10000};
    std::vector<double> errs;
    for (auto n : ns) errs.push_back(3.0 * std::pow(static_cast<double>(n), -0.4));
    const auto fit = fit_rate(ns, errs, 0.5, 1.0 / 3.0);
    REQUIRE(fit.defined);
    CHECK(fit.fitted_exponent == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.theoretical_exponent == doctest::Approx(-0.5 / 2.0 * (2.0 / 3.0)));

    CHECK_FALSE(fit_rate({100, 1000}, {0.1, 0.05}, 0.5, 0.3).defined);
    CHECK_FALSE(fit_rate(ns, {0.1, 0.0, 0.01}, 0.5, 0.3).defined);
}
