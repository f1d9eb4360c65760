#include <doctest.h>

#include "divest/distributions.hpp"
#include "divest/error.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace divest;

namespace {

double at(const AnalyticDensity& f, std::vector<double> x) { return f.density(x); }

}  // namespace

TEST_CASE("density values") {
    const auto n = AnalyticDensity::gaussian({0.0}, {1.0});
    CHECK(at(n, {0.3}) == doctest::Approx(oracle::normal_pdf(0.3, 0, 1)).epsilon(1e-14));

    const auto mix = AnalyticDensity::mixture({0.5, 0.5}, {{-1.0}, {1.0}}, {{1.0}, {1.0}});
    CHECK(at(mix, {0.0}) == doctest::Approx(0.241971).epsilon(1e-6));

    const auto u = AnalyticDensity::uniform_box({0.0, 0.0}, {2.0, 0.5});
    CHECK(at(u, {1.0, 0.25}) == doctest::Approx(1.0));
    CHECK(at(u, {2.5, 0.25}) == 0.0);

    const auto t = AnalyticDensity::truncated_gaussian({0.0}, {1.0}, {-1.0}, {2.0});
    const double mass = oracle::normal_cdf(2.0) - oracle::normal_cdf(-1.0);
    CHECK(at(t, {0.5}) == doctest::Approx(oracle::normal_pdf(0.5, 0, 1) / mass).epsilon(1e-12));
    CHECK(at(t, {-1.5}) == 0.0);
    std::vector<double> x{0.5};
    CHECK(t.log_density(x) == doctest::Approx(std::log(at(t, {0.5}))).epsilon(1e-12));
}

TEST_CASE("densities integrate to one") {
    const auto mix = AnalyticDensity::mixture({0.3, 0.7}, {{-1.0}, {2.0}}, {{0.5}, {1.5}});
    CHECK(oracle::simpson([&](double x) { return at(mix, {x}); }, -15, 20) == doctest::Approx(1.0).epsilon(1e-10));
    const auto t = AnalyticDensity::truncated_gaussian({1.0}, {2.0}, {-1.0}, {2.0});
    CHECK(oracle::simpson([&](double x) { return at(t, {x}); }, -1, 2) == doctest::Approx(1.0).epsilon(1e-10));
    const auto g2 = AnalyticDensity::gaussian({0.0, 1.0}, {1.0, 0.5});
    CHECK(oracle::simpson2([&](double x, double y) { return at(g2, {x, y}); }, -9, 9, -4, 6) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(AnalyticDensity::gaussian({0.0}, {-1.0}), ParameterError);
    CHECK_THROWS_AS(AnalyticDensity::gaussian({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(AnalyticDensity::uniform_box({1.0}, {0.0}), ParameterError);
    CHECK_THROWS_AS(AnalyticDensity::mixture({0.5, 0.6}, {{0.0}, {1.0}}, {{1.0}, {1.0}}), ParameterError);
    CHECK_THROWS_AS(AnalyticDensity::mixture({1.0}, {{0.0}}, {{1.0}, {1.0}}), ParameterError);
}

TEST_CASE("support metadata") {
    const auto t = AnalyticDensity::truncated_gaussian({0.0}, {1.0}, {-2.0}, {2.0});
    REQUIRE(t.support());
    CHECK(t.support()->lower[0] == -2.0);
    REQUIRE(t.support_floor());
    CHECK(*t.support_floor() == doctest::Approx(at(t, {2.0})).epsilon(1e-12));
    const auto u = AnalyticDensity::uniform_box({0.0}, {4.0});
    CHECK(*u.support_floor() == doctest::Approx(0.25));
    const auto n = AnalyticDensity::gaussian({0.0}, {2.0});
    CHECK_FALSE(n.support());
    CHECK_FALSE(n.support_floor());
    CHECK(n.sup_density() == doctest::Approx(oracle::normal_pdf(0, 0, 2)).epsilon(1e-12));
    const auto mix = AnalyticDensity::mixture({0.5, 0.5}, {{-1.0}, {1.0}}, {{0.5}, {0.5}});
    double best = 0.0;
    for (int i = -3000; i <= 3000; ++i) best = std::max(best, at(mix, {i * 1e-3}));
    CHECK(mix.sup_density() == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("sampling is reproducible and has the right moments") {
    const auto t = AnalyticDensity::truncated_gaussian({0.5}, {1.0}, {-1.0}, {1.5});
    const auto a = t.draw_sample(50000, 11);
    const auto b = t.draw_sample(50000, 11);
    CHECK(a.data == b.data);
    CHECK(a.seed == 11);
    double mean = 0.0;
    for (double v : a.data) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.5);
        mean += v;
    }
    mean /= 50000.0;
    const double expected = oracle::simpson([&](double x) { return x * at(t, {x}); }, -1.0, 1.5);
    CHECK(mean == doctest::Approx(expected).epsilon(0.02));

    const auto mix = AnalyticDensity::mixture({0.25, 0.75}, {{-2.0}, {2.0}}, {{0.5}, {0.5}});
    const auto s = mix.draw_sample(40000, 3);
    double right = 0.0;
    for (double v : s.data) right += v > 0.0;
    CHECK(right / 40000.0 == doctest::Approx(0.75).epsilon(0.02));

    std::vector<double> one(1);
    mix.draw_one(3, 17, one);
    CHECK(one[0] == s.data[17]);
}

TEST_CASE("true divergences of a Gaussian pair") {
    const auto f = AnalyticDensity::gaussian({0.0}, {1.0});
    const auto g = AnalyticDensity::gaussian({1.0}, {1.0});
    const auto t = true_divergences(f, g, 0.5);
    CHECK(t.closed_form);
    CHECK(t.d_alpha == doctest::Approx(0.882497).epsilon(1e-6));
    CHECK(t.renyi == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t.tsallis == doctest::Approx(0.235006).epsilon(1e-6));
    CHECK(t.kl == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.hellinger == doctest::Approx(0.117503).epsilon(1e-6));
    CHECK(t.bhattacharyya == doctest::Approx(0.125).epsilon(1e-12));

    const auto wide = AnalyticDensity::gaussian({0.0}, {2.0});
    CHECK(true_divergences(f, wide, 0.5).d_alpha == doctest::Approx(std::sqrt(0.8)).epsilon(1e-10));
    for (double a : {0.25, 0.75}) {
        const auto ta = true_divergences(f, wide, a);
        CHECK(ta.d_alpha == doctest::Approx(oracle::gaussian_dalpha(0, 1, 0, 2, a)).epsilon(1e-10));
        CHECK(ta.kl == doctest::Approx(oracle::gaussian_kl(0, 1, 0, 2)).epsilon(1e-10));
    }
}

TEST_CASE("true divergences by quadrature") {
    const auto mix = AnalyticDensity::mixture({0.4, 0.6}, {{-1.0}, {1.5}}, {{0.7}, {1.0}});
    const auto g = AnalyticDensity::gaussian({0.0}, {1.5});
    const auto t = true_divergences(mix, g, 0.3);
    CHECK_FALSE(t.closed_form);
    const double d = oracle::simpson(
        [&](double x) { return std::pow(at(mix, {x}), 0.3) * std::pow(at(g, {x}), 0.7); }, -20, 20, 40000);
    CHECK(t.d_alpha == doctest::Approx(d).epsilon(1e-9));
    CHECK(t.renyi == doctest::Approx(oracle::renyi(d, 0.3)).epsilon(1e-8));
    const double kl = oracle::simpson(
        [&](double x) {
            const double p = at(mix, {x});
            return p > 0 ? p * std::log(p / at(g, {x})) : 0.0;
        },
        -20, 20, 40000);
    CHECK(t.kl == doctest::Approx(kl).epsilon(1e-8));
}

TEST_CASE("KL is infinite when f escapes the support of g") {
    const auto f = AnalyticDensity::gaussian({0.0}, {1.0});
    const auto g = AnalyticDensity::uniform_box({-3.0}, {3.0});
    const auto t = true_divergences(f, g, 0.5);
    CHECK(std::isinf(t.kl));
    const double d = oracle::simpson([&](double x) { return std::sqrt(oracle::normal_pdf(x, 0, 1) / 6.0); }, -3, 3);
    CHECK(t.d_alpha == doctest::Approx(d).epsilon(1e-9));
}

TEST_CASE("power integral of g") {
    const auto g = AnalyticDensity::gaussian({0.0}, {1.0});
    // int phi^p = (2 pi)^((1-p)/2) p^(-1/2)
    const double p = 0.5;
    CHECK(power_integral(g, p) ==
          doctest::Approx(std::pow(2.0 * std::numbers::pi, (1.0 - p) / 2.0) / std::sqrt(p)).epsilon(1e-9));
}
