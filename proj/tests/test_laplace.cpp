#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "elastic_reflect/laplace.hpp"
#include "elastic_reflect/rng.hpp"

using namespace elastic_reflect;

namespace {

ValidatedModel brownian() {
    return validate_model(DiffusionModel::brownian(0.0, 1.0));
}
ValidatedModel unit_ou() {
    return validate_model(DiffusionModel::ornstein_uhlenbeck(0.0, 1.0, 1.0));
}

// unit-OU log-derivative at lambda = 1 (see test_phi_solver.cpp)
double ou_u_lambda1(double x) {
    return 2.0 * x + (2.0 / std::sqrt(M_PI)) * std::exp(-x * x) / std::erfc(-x);
}

}  // namespace

TEST_CASE("limit transform closed forms for Brownian motion") {
    LaplaceQuery q{brownian(), BoundarySpec::constant(0.0), 0.5, 1.0, std::nullopt};
    auto r = limit_lt(q);
    CHECK(r.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(r.route == Route::integral);

    // elastic square-root boundary: exponent sqrt(2 lambda) (sqrt(l) + l)
    LaplaceQuery q2{brownian(), BoundarySpec::sqrt(0.0, 1.0), 2.0, 1.0,
                    std::nullopt};
    CHECK(limit_lt(q2).value == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
}

TEST_CASE("zero local-time level gives a unit transform") {
    LaplaceQuery q{unit_ou(), BoundarySpec::sqrt(0.0, 1.0), 2.0, 0.0, std::nullopt};
    auto r = limit_lt(q);
    CHECK(r.value == 1.0);
    CHECK(r.quadrature_error == 0.0);
    CHECK(r.route == Route::closed_form);
}

TEST_CASE("limit transform against an independent Simpson oracle (OU)") {
    // integrand (g'+1) u(g(a)) with the erfc closed form for u, integrated
    // by plain Simpson on a fine fixed grid; fully independent of the
    // solver/quadrature path under test
    const double ell = 1.2;
    const BoundarySpec g = BoundarySpec::linear(0.25, 0.5);
    const int n = 4000;  // even
    double simpson = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double a = ell * i / n;
        const double f = (0.5 + 1.0) * ou_u_lambda1(g.value(a));
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        simpson += w * f;
    }
    simpson *= ell / (3.0 * n);

    LaplaceQuery q{unit_ou(), g, 1.0, ell, std::nullopt};
    CHECK(limit_lt(q).value ==
          doctest::Approx(std::exp(-simpson)).epsilon(1e-9));
}

TEST_CASE("discrete transform equals the limit for BM when u is constant") {
    LaplaceQuery q{brownian(), BoundarySpec::constant(0.0), 0.5, 1.0, 0.25};
    auto r = discrete_lt(q);
    CHECK(r.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(r.route == Route::integral);
}

TEST_CASE("level below eps means the first excursion has not started") {
    LaplaceQuery q{unit_ou(), BoundarySpec::linear(0.5, 1.0), 1.0, 0.3, 0.5};
    for (auto* f : {&discrete_lt, &discrete_lt_product}) {
        auto r = (*f)(q, SolverOptions{});
        CHECK(r.value == 1.0);
        CHECK(r.route == Route::closed_form);
    }
}

TEST_CASE("product route closed forms for BM") {
    // four excursions, each with transform exp(-eps*sqrt(2 lambda))
    LaplaceQuery q{brownian(), BoundarySpec::constant(0.0), 0.5, 1.0, 0.25};
    auto r = discrete_lt_product(q);
    CHECK(r.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(r.route == Route::product);

    LaplaceQuery q2{brownian(), BoundarySpec::constant(0.0), 2.0, 1.0, 0.5};
    CHECK(discrete_lt_product(q2).value ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("integral and product routes agree to 1e-10 (randomized sweep)") {
    CounterRng rng(321321, 0);
    int checked = 0;
    for (int i = 0; i < 24; ++i) {
        ValidatedModel model =
            (i % 2 == 0)
                ? validate_model(DiffusionModel::brownian(
                      2.0 * (rng.uniform() - 0.5), 0.6 + 1.4 * rng.uniform()))
                : validate_model(DiffusionModel::ornstein_uhlenbeck(
                      rng.uniform() - 0.5, 0.3 + 1.7 * rng.uniform(),
                      0.6 + 1.4 * rng.uniform()));
        BoundarySpec g;
        switch (i % 4) {
            case 0: g = BoundarySpec::constant(2.0 * (rng.uniform() - 0.5)); break;
            case 1:
                g = BoundarySpec::linear(rng.uniform() - 0.5, 1.5 * rng.uniform());
                break;
            case 2:
                g = BoundarySpec::sqrt(rng.uniform() - 0.5, 0.2 + rng.uniform());
                break;
            default:
                g = BoundarySpec::power(rng.uniform() - 0.5, 0.2 + rng.uniform(),
                                        0.25 + 0.75 * rng.uniform());
        }
        const double lambda = 0.3 + 2.7 * rng.uniform();
        const double ell = 0.3 + 1.7 * rng.uniform();
        const double eps = ell * (0.08 + 0.5 * rng.uniform());
        LaplaceQuery q{model, g, lambda, ell, eps};

        auto a = discrete_lt(q);
        auto b = discrete_lt_product(q);
        CHECK(a.value > 0.0);
        CHECK(a.value <= 1.0);
        CHECK(b.value > 0.0);
        CHECK(b.value <= 1.0);
        CHECK(a.quadrature_error >= 0.0);
        CHECK(std::abs(a.value - b.value) <= 1e-10 * a.value);
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("discrete transform converges first-order to the limit (OU)") {
    LaplaceQuery base{unit_ou(), BoundarySpec::linear(0.5, 1.0), 1.0, 1.0,
                      std::nullopt};
    const double lim = limit_lt(base).value;
    std::vector<double> gaps;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        LaplaceQuery q = base;
        q.eps = eps;
        gaps.push_back(std::abs(discrete_lt(q).value - lim));
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        CHECK(gaps[i] < gaps[i - 1]);  // shrinking
        const double ratio = gaps[i - 1] / gaps[i];
        CHECK(ratio >= 1.6);
        CHECK(ratio <= 2.4);
    }
}

TEST_CASE("limit transform is nonincreasing in level and rate") {
    auto ou = unit_ou();
    const BoundarySpec g = BoundarySpec::sqrt(0.0, 1.0);
    double prev = 1.0;
    for (double ell : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        LaplaceQuery q{ou, g, 1.0, ell, std::nullopt};
        const double v = limit_lt(q).value;
        CHECK(v <= prev + 1e-12);
        CHECK(v > 0.0);
        prev = v;
    }
    prev = 1.0;
    for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        LaplaceQuery q{ou, g, lambda, 1.0, std::nullopt};
        const double v = limit_lt(q).value;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("query validation") {
    LaplaceQuery q{brownian(), BoundarySpec::constant(0.0), 1.0, 1.0, std::nullopt};
    LaplaceQuery bad_lambda = q;
    bad_lambda.lambda = 0.0;
    CHECK_THROWS_AS(limit_lt(bad_lambda), ValidationError);
    LaplaceQuery bad_ell = q;
    bad_ell.ell = -1.0;
    CHECK_THROWS_AS(limit_lt(bad_ell), ValidationError);
    CHECK_THROWS_AS(discrete_lt(q), ValidationError);  // eps missing
    LaplaceQuery bad_eps = q;
    bad_eps.eps = -0.5;
    CHECK_THROWS_AS(discrete_lt(bad_eps), ValidationError);
}

TEST_CASE("cell counting snaps near-integer quotients") {
    CHECK(cell_count(1.0, 0.1) == 10);
    CHECK(cell_count(1.0, 0.05) == 20);
    CHECK(cell_count(1.0, 0.25) == 4);
    CHECK(cell_count(0.3, 0.5) == 0);
    CHECK(cell_count(0.99, 0.1) == 9);
}
