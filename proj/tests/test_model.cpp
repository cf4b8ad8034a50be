#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "elastic_reflect/model.hpp"
#include "elastic_reflect/rng.hpp"

using namespace elastic_reflect;

TEST_CASE("validate_model accepts standard Brownian motion") {
    auto m = validate_model(DiffusionModel::brownian(0.0, 1.0));
    CHECK(m.recurrent);
    CHECK_FALSE(m.recurrence_warning);
    CHECK(m.sigma_min == 1.0);
    CHECK(m.drift_lipschitz == 0.0);
}

TEST_CASE("validate_model rejects non-positive volatility") {
    CHECK_THROWS_AS(validate_model(DiffusionModel::brownian(0.0, 0.0)),
                    NonPositiveVolatility);
    CHECK_THROWS_AS(validate_model(DiffusionModel::brownian(0.0, -1.0)),
                    NonPositiveVolatility);
}

TEST_CASE("validate_model rejects an empty window") {
    auto m = DiffusionModel::brownian(0.0, 1.0, 2.0, 2.0);
    CHECK_THROWS_AS(validate_model(m), EmptyDomain);
}

TEST_CASE("mean-reverting affine drift is recurrent") {
    // b(x) = rho*sigma*sigma_hat - beta*x with beta > 0
    const double rho = 0.3, sigma = 1.0, sigma_hat = 0.8, beta = 2.0;
    auto m = validate_model(
        DiffusionModel::ornstein_uhlenbeck(rho * sigma * sigma_hat, beta, sigma));
    CHECK(m.recurrent);
    CHECK_FALSE(m.recurrence_warning);
    CHECK(m.drift_lipschitz == beta);
}

TEST_CASE("nonzero constant drift only gets a warning flag") {
    auto m = validate_model(DiffusionModel::brownian(0.5, 1.0));
    CHECK_FALSE(m.recurrent);
    CHECK(m.recurrence_warning);
}

TEST_CASE("validate_model is idempotent") {
    auto once = validate_model(DiffusionModel::ornstein_uhlenbeck(0.1, 1.5, 0.9));
    auto twice = validate_model(once.spec);
    CHECK(once.sigma_min == twice.sigma_min);
    CHECK(once.drift_lipschitz == twice.drift_lipschitz);
    CHECK(once.recurrent == twice.recurrent);
    CHECK(once.recurrence_warning == twice.recurrence_warning);
}

TEST_CASE("eval_coefficients family formulas") {
    auto bm = validate_model(DiffusionModel::brownian(0.0, 1.0));
    auto [b1, s1] = eval_coefficients(bm, 3.7);
    CHECK(b1 == 0.0);
    CHECK(s1 == 1.0);

    auto ou = validate_model(DiffusionModel::ornstein_uhlenbeck(0.0, 1.0, 1.0));
    auto [b2, s2] = eval_coefficients(ou, 2.0);
    CHECK(b2 == -2.0);
    CHECK(s2 == 1.0);

    auto ou2 = validate_model(DiffusionModel::ornstein_uhlenbeck(1.0, 0.5, 2.0));
    auto [b3, s3] = eval_coefficients(ou2, 2.0);
    CHECK(b3 == 0.0);
    CHECK(s3 == 2.0);
}

TEST_CASE("eval_coefficients rejects points outside the window") {
    auto m = validate_model(DiffusionModel::brownian(0.0, 1.0, -1.0, 1.0));
    CHECK_THROWS_AS(eval_coefficients(m, 5.0), OutOfDomain);
}

TEST_CASE("eval_boundary families and singular-derivative sentinel") {
    auto [v1, d1] = eval_boundary(BoundarySpec::constant(0.0), 5.0);
    CHECK(v1 == 0.0);
    CHECK(d1 == 0.0);

    auto [v2, d2] = eval_boundary(BoundarySpec::sqrt(0.0, 1.0), 4.0);
    CHECK(v2 == doctest::Approx(2.0));
    CHECK(d2 == doctest::Approx(0.25));

    auto [v3, d3] = eval_boundary(BoundarySpec::linear(0.5, 1.0), 2.0);
    CHECK(v3 == doctest::Approx(2.5));
    CHECK(d3 == 1.0);

    auto [v4, d4] = eval_boundary(BoundarySpec::sqrt(0.0, 1.0), 0.0);
    CHECK(v4 == 0.0);
    CHECK(std::isinf(d4));

    auto [v5, d5] = eval_boundary(BoundarySpec::power(1.0, 2.0, 0.75), 0.0);
    CHECK(v5 == 1.0);
    CHECK(std::isinf(d5));

    CHECK_THROWS_AS(eval_boundary(BoundarySpec::constant(0.0), -0.1),
                    NegativeLocalTime);
}

TEST_CASE("boundary validation rejects bad parameters") {
    CHECK_THROWS_AS(BoundarySpec::linear(0.0, -1.0).validate(), ValidationError);
    CHECK_THROWS_AS(BoundarySpec::power(0.0, 1.0, 0.0).validate(), ValidationError);
    CHECK_THROWS_AS(BoundarySpec::power(0.0, 1.0, 1.5).validate(), ValidationError);
    CHECK_NOTHROW(BoundarySpec::power(0.0, 1.0, 1.0).validate());
}

TEST_CASE("boundaries are nondecreasing in local time") {
    const BoundarySpec specs[] = {
        BoundarySpec::constant(-1.0),
        BoundarySpec::linear(0.5, 2.0),
        BoundarySpec::sqrt(-0.5, 1.5),
        BoundarySpec::power(0.0, 1.0, 0.3),
        BoundarySpec::power(1.0, 0.7, 0.9),
    };
    CounterRng rng(20240601, 0);
    for (const auto& g : specs) {
        for (int i = 0; i < 500; ++i) {
            double l1 = 10.0 * rng.uniform();
            double l2 = 10.0 * rng.uniform();
            if (l1 > l2) std::swap(l1, l2);
            CHECK(g.value(l1) <= g.value(l2) + 1e-12);
        }
    }
}

TEST_CASE("generator residual vanishes exactly on eigenfunctions") {
    auto bm = validate_model(DiffusionModel::brownian(0.0, 1.0));
    // exp(x*sqrt(2*lambda)) solves (1/2) phi'' = lambda phi; at lambda = 0.5
    // the triple at x = 0 is (1, 1, 1)
    CHECK(eval_generator_residual(bm, 0.5, 0.0, 1.0, 1.0, 1.0) ==
          doctest::Approx(0.0));
    // lambda = 2: phi = exp(2x) gives (1, 2, 4) at x = 0
    CHECK(eval_generator_residual(bm, 2.0, 0.0, 1.0, 2.0, 4.0) ==
          doctest::Approx(0.0));
    // a constant is not an eigenfunction
    CHECK(eval_generator_residual(bm, 1.0, 0.0, 1.0, 1.0, 1.0) ==
          doctest::Approx(-0.5));
}

TEST_CASE("generator residual is linear in the function triple") {
    auto ou = validate_model(DiffusionModel::ornstein_uhlenbeck(0.2, 1.3, 0.8));
    CounterRng rng(99, 0);
    for (int i = 0; i < 200; ++i) {
        const double x = 4.0 * (rng.uniform() - 0.5);
        const double lambda = 0.1 + 3.0 * rng.uniform();
        double a[3], b[3];
        for (auto& v : a) v = 2.0 * (rng.uniform() - 0.5);
        for (auto& v : b) v = 2.0 * (rng.uniform() - 0.5);
        const double s = 2.0 * (rng.uniform() - 0.5);
        const double lhs = eval_generator_residual(
            ou, lambda, x, a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]);
        const double rhs =
            eval_generator_residual(ou, lambda, x, a[0], a[1], a[2]) +
            s * eval_generator_residual(ou, lambda, x, b[0], b[1], b[2]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("generator residual validates inputs") {
    auto bm = validate_model(DiffusionModel::brownian(0.0, 1.0, -1.0, 1.0));
    CHECK_THROWS_AS(eval_generator_residual(bm, -1.0, 0.0, 1.0, 1.0, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(eval_generator_residual(bm, 1.0, 3.0, 1.0, 1.0, 1.0),
                    OutOfDomain);
}
