#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "elastic_reflect/estimator.hpp"
#include "elastic_reflect/laplace.hpp"
#include "elastic_reflect/simulator.hpp"

using namespace elastic_reflect;

namespace {

ValidatedModel brownian() {
    return validate_model(DiffusionModel::brownian(0.0, 1.0));
}

}  // namespace

TEST_CASE("initial state after the jump away from the boundary") {
    const BoundarySpec g = BoundarySpec::sqrt(0.5, 1.0);
    SchemeConfig cfg;
    cfg.eps = 0.1;
    cfg.T = 0.01;
    auto path = simulate_reflected_path(brownian(), g, cfg);
    REQUIRE(!path.times.empty());
    CHECK(path.times[0] == 0.0);
    CHECK(path.l_values[0] == cfg.eps);
    CHECK(path.x_values[0] == doctest::Approx(g.value(0.0) - cfg.eps));
    REQUIRE(!path.jump_times.empty());
    CHECK(path.jump_times[0] == 0.0);
}

TEST_CASE("path invariants hold across many sampled paths") {
    const BoundarySpec g = BoundarySpec::sqrt(0.0, 1.0);
    auto model = brownian();
    SchemeConfig cfg;
    cfg.eps = 0.05;
    cfg.h = 2e-4;
    cfg.T = 0.5;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        cfg.path_index = i;
        auto path = simulate_reflected_path(model, g, cfg);
        REQUIRE_FALSE(path.aborted);

        std::size_t jump_cursor = 0;
        REQUIRE(path.jump_times[0] == 0.0);
        double prev_l = 0.0;  // pre-initial-jump local time
        for (std::size_t k = 0; k < path.times.size(); ++k) {
            const double l = path.l_values[k];
            const double x = path.x_values[k];
            CHECK(l >= prev_l);
            CHECK(x <= g.value(l) + 1e-12);
            if (l > prev_l) {
                // a jump: local time moves by exactly eps, at a ledger entry,
                // and the state lands eps below the pre-jump boundary
                CHECK(l == doctest::Approx(prev_l + cfg.eps).epsilon(1e-12));
                REQUIRE(jump_cursor < path.jump_times.size());
                CHECK(path.jump_times[jump_cursor] ==
                      doctest::Approx(path.times[k]).epsilon(1e-12));
                CHECK(x == doctest::Approx(g.value(l - cfg.eps) - cfg.eps)
                               .epsilon(1e-12));
                ++jump_cursor;
            }
            prev_l = l;
        }
        CHECK(jump_cursor == path.jump_times.size());
    }
}

TEST_CASE("identical seed and path index reproduce the path bit-for-bit") {
    const BoundarySpec g = BoundarySpec::linear(0.2, 0.5);
    auto model = validate_model(DiffusionModel::ornstein_uhlenbeck(0.0, 1.0, 1.0));
    SchemeConfig cfg;
    cfg.eps = 0.05;
    cfg.T = 0.5;
    cfg.seed = 77;
    cfg.path_index = 3;
    auto a = simulate_reflected_path(model, g, cfg);
    auto b = simulate_reflected_path(model, g, cfg);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        CHECK(a.x_values[k] == b.x_values[k]);
        CHECK(a.l_values[k] == b.l_values[k]);
    }
    CHECK(a.jump_times == b.jump_times);
}

TEST_CASE("unreachable boundary leaves only the initial jump") {
    // jump size so large the path cannot climb back within the horizon
    auto model = validate_model(DiffusionModel::brownian(0.0, 1.0, -2e6, 2e6));
    const BoundarySpec g = BoundarySpec::constant(0.0);
    SchemeConfig cfg;
    cfg.eps = 1e6;
    cfg.h = 1e-3;
    cfg.T = 1.0;
    auto path = simulate_reflected_path(model, g, cfg);
    CHECK_FALSE(path.aborted);
    CHECK(path.jump_times.size() == 1);
    CHECK(path.l_values.back() == cfg.eps);
}

TEST_CASE("paths leaving the window abort with a diagnostic") {
    auto model = validate_model(DiffusionModel::brownian(0.0, 1.0, 4.0, 10.0));
    const BoundarySpec g = BoundarySpec::constant(5.0);
    SchemeConfig cfg;
    cfg.eps = 0.1;
    cfg.h = 1e-3;
    cfg.T = 5.0;
    auto path = simulate_reflected_path(model, g, cfg);
    CHECK(path.aborted);
    CHECK(path.abort_reason.find("domain exit") != std::string::npos);
}

TEST_CASE("hitting-time draw from the start point is zero") {
    CHECK(sample_hitting_time(brownian(), 1.0, 1.0, 1, 0) == 0.0);
    CHECK_THROWS_AS(sample_hitting_time(brownian(), 2.0, 1.0, 1, 0),
                    DescendingHit);
}

TEST_CASE("driftless exact sampler matches the hitting transform") {
    auto model = brownian();
    const double lambda = 0.5;
    const std::size_t n = 1'000'000;
    std::vector<double> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
        draws[i] = sample_hitting_time(model, 0.0, 1.0, 2024, i);
    }
    auto est = estimate_lt(draws, lambda);
    // exp(-sqrt(2 lambda) d) = e^{-1}
    CHECK(std::abs(est.mean - std::exp(-1.0)) <= 3.0 * est.se);
}

TEST_CASE("inverse-Gaussian sampler has the right mean") {
    auto model = validate_model(DiffusionModel::brownian(1.0, 1.0));
    const std::size_t n = 1'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = sample_hitting_time(model, 0.0, 1.0, 7, i);
        sum += t;
        sum2 += t * t;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum2 / n - mean * mean) * n / (n - 1.0));
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);  // IG mean = d / mu
}

TEST_CASE("downward constant drift falls back and may censor") {
    auto model = validate_model(DiffusionModel::brownian(-2.0, 1.0));
    HittingSampleInfo info;
    FallbackOptions fb;
    fb.time_cap = 5.0;
    const double t = sample_hitting_time(model, 0.0, 3.0, 11, 0, &info, fb);
    CHECK(info.non_hitting_drift);
    CHECK(info.used_path_fallback);
    if (std::isinf(t)) CHECK(info.capped);
}

TEST_CASE("excursion sum below the first cell is zero") {
    CHECK(sample_inverse_local_time(brownian(), BoundarySpec::constant(0.0), 0.5,
                                    0.3, 1, 0,
                                    LocalTimeMethod::excursion_sum) == 0.0);
}

TEST_CASE("excursion-sum transform estimate matches the discrete analytics") {
    auto model = brownian();
    const BoundarySpec g = BoundarySpec::constant(0.0);
    const double eps = 0.25, ell = 1.0, lambda = 0.5;
    const std::size_t n = 100'000;
    std::vector<double> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
        draws[i] = sample_inverse_local_time(model, g, eps, ell, 31, i,
                                             LocalTimeMethod::excursion_sum);
    }
    auto est = estimate_lt(draws, lambda);
    LaplaceQuery q{model, g, lambda, ell, eps};
    const double analytic = discrete_lt(q).value;
    CHECK(analytic == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(std::abs(est.mean - analytic) <= 3.0 * est.se);
}

TEST_CASE("excursion-sum estimate tracks the sqrt-boundary analytics") {
    auto model = brownian();
    const BoundarySpec g = BoundarySpec::sqrt(0.0, 1.0);
    const double eps = 0.01, ell = 1.0, lambda = 1.0;
    const std::size_t n = 20'000;
    std::vector<double> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
        draws[i] = sample_inverse_local_time(model, g, eps, ell, 37, i,
                                             LocalTimeMethod::excursion_sum);
    }
    auto est = estimate_lt(draws, lambda);
    LaplaceQuery q{model, g, lambda, ell, eps};
    CHECK(std::abs(est.mean - discrete_lt(q).value) <= 3.0 * est.se);
}

TEST_CASE("excursion-sum and path sampling agree in distribution") {
    auto model = brownian();
    const BoundarySpec g = BoundarySpec::constant(0.0);
    const double eps = 0.1, ell = 1.0;
    const std::size_t n = 10'000;
    SchemeConfig scheme;
    scheme.T = 30.0;  // censoring horizon applied to both samples
    scheme.bridge_correction = true;

    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = sample_inverse_local_time(model, g, eps, ell, 101, i,
                                         LocalTimeMethod::excursion_sum);
        if (a[i] >= scheme.T) a[i] = std::numeric_limits<double>::infinity();
        b[i] = sample_inverse_local_time(model, g, eps, ell, 202, i,
                                         LocalTimeMethod::path, scheme);
    }
    const double d = two_sample_ks(a, b);
    CHECK(d < ks_critical_value(n, n, 0.01));
}

TEST_CASE("OU hitting transform against Monte Carlo fallback paths") {
    auto ou = validate_model(DiffusionModel::ornstein_uhlenbeck(0.0, 1.0, 1.0));
    const double lambda = 1.0;
    const std::size_t n = 20'000;
    std::vector<double> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
        draws[i] = sample_hitting_time(ou, 0.0, 0.5, 555, i);
    }
    auto est = estimate_lt(draws, lambda);
    const double analytic = hitting_lt(ou, lambda, 0.0, 0.5);
    CHECK(std::abs(est.mean - analytic) <= 3.0 * est.se);
}

TEST_CASE("scheme validation") {
    SchemeConfig cfg;
    cfg.eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.eps = 0.1;
    cfg.T = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
