#include <doctest.h>

#include "divest/error.hpp"
#include "divest/grid.hpp"
#include "divest/kernel.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace divest;

TEST_CASE("kernel values") {
    const KernelSpec g1{KernelFamily::Gaussian, 1, 2};
    const std::vector<double> zero1{0.0};
    CHECK(evaluate_kernel(g1, zero1) == doctest::Approx(0.398942).epsilon(1e-6));
    const std::vector<double> at1{1.3};
    CHECK(evaluate_kernel(g1, at1) == doctest::Approx(oracle::gaussian_kernel(1.3)).epsilon(1e-14));

    const KernelSpec e2{KernelFamily::EpanechnikovProduct, 2, 2};
    const std::vector<double> zero2{0.0, 0.0};
    CHECK(evaluate_kernel(e2, zero2) == doctest::Approx(0.5625));
    const std::vector<double> outside{1.2, 0.0};
    CHECK(evaluate_kernel(e2, outside) == 0.0);

    const KernelSpec b3{KernelFamily::UniformBox, 3, 2};
    const std::vector<double> in3{0.9, -0.9, 0.0};
    CHECK(evaluate_kernel(b3, in3) == doctest::Approx(0.125));
}

TEST_CASE("kernel argument checks") {
    const KernelSpec g1{KernelFamily::Gaussian, 1, 2};
    const std::vector<double> two{0.0, 0.0};
    CHECK_THROWS_AS(evaluate_kernel(g1, two), ParameterError);
    const std::vector<double> bad{std::nan("")};
    CHECK_THROWS_AS(evaluate_kernel(g1, bad), DomainError);
    CHECK_THROWS_AS(kernel_family_from_name("triweight"), ParameterError);
    CHECK(kernel_family_from_name("box") == KernelFamily::UniformBox);
    CHECK_THROWS_AS((KernelSpec{KernelFamily::Gaussian, 4, 2}.check()), ParameterError);
    CHECK_THROWS_AS((KernelSpec{KernelFamily::Gaussian, 1, 1}.check()), ParameterError);
}

TEST_CASE("square integrals match Simpson") {
    const double g = oracle::simpson([](double t) { return std::pow(oracle::gaussian_kernel(t), 2); }, -12, 12);
    const double e = oracle::simpson([](double t) { return std::pow(oracle::epanechnikov_kernel(t), 2); }, -1, 1);
    CHECK(kernel_square_integral({KernelFamily::Gaussian, 1, 2}) == doctest::Approx(g).epsilon(1e-10));
    CHECK(kernel_square_integral({KernelFamily::EpanechnikovProduct, 1, 2}) == doctest::Approx(e).epsilon(1e-10));
    CHECK(kernel_square_integral({KernelFamily::UniformBox, 2, 2}) == doctest::Approx(0.25));
    CHECK(kernel_square_integral({KernelFamily::Gaussian, 2, 2}) == doctest::Approx(g * g).epsilon(1e-10));
}

TEST_CASE("validate_kernel accepts shipped kernels at order 2") {
    for (auto fam : {KernelFamily::Gaussian, KernelFamily::EpanechnikovProduct, KernelFamily::UniformBox}) {
        for (int d = 1; d <= 3; ++d) {
            CAPTURE(d);
            const auto report = validate_kernel({fam, d, 2}, 1e-6);
            CHECK(report.all_passed());
            CHECK(report.integral == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("validate_kernel order constants") {
    // Smallest degree-2 absolute moment in d = 1 is int u^2 K.
    CHECK(validate_kernel({KernelFamily::Gaussian, 1, 2}, 1e-6).order_constant == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(validate_kernel({KernelFamily::UniformBox, 1, 2}, 1e-6).order_constant ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(validate_kernel({KernelFamily::EpanechnikovProduct, 1, 2}, 1e-6).order_constant ==
          doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("validate_kernel rejects a Gaussian claimed at order 4") {
    const auto report = validate_kernel({KernelFamily::Gaussian, 1, 4}, 1e-6);
    CHECK_FALSE(report.all_passed());
    bool moment_failed = false;
    for (const auto& c : report.checks)
        if (c.condition == "moment_order") moment_failed = !c.passed;
    CHECK(moment_failed);
    // The failing moment is the second one, equal to 1.
    CHECK(report.moments.size() == 4);
    CHECK(report.moments[1].signed_moment == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evaluation grid") {
    const EvaluationGrid grid({0.0, -1.0}, {1.0, 1.0}, 5);
    CHECK(grid.size() == 25);
    CHECK(grid.spacing(0) == doctest::Approx(0.25));
    const auto x = grid.node(7);  // row 1, column 2
    CHECK(x[0] == doctest::Approx(0.25));
    CHECK(x[1] == doctest::Approx(0.0));
    double total = 0.0;
    for (double w : grid.weights()) total += w;
    CHECK(total == doctest::Approx(2.0));
    // Trapezoid weights integrate linear functions exactly.
    double lin = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) lin += grid.weight(i) * (grid.node(i)[0] + 3.0 * grid.node(i)[1]);
    CHECK(lin == doctest::Approx(1.0));
    CHECK_THROWS(EvaluationGrid({1.0}, {0.0}, 5));
}
