#include "elastic_reflect/laplace.hpp"

#include <cmath>
#include <string>

#include "elastic_reflect/detail/quadrature.hpp"
#include "elastic_reflect/detail/summation.hpp"

namespace elastic_reflect {

namespace {

void validate_query(const LaplaceQuery& q, bool need_eps) {
    if (!(q.lambda > 0.0) || !std::isfinite(q.lambda)) {
        throw ValidationError("query.lambda must be > 0");
    }
    if (!(q.ell >= 0.0) || !std::isfinite(q.ell)) {
        throw ValidationError("query.ell must be >= 0");
    }
    q.boundary.validate();
    if (need_eps) {
        if (!q.eps.has_value()) {
            throw ValidationError("query.eps required for the discrete transform");
        }
        if (!(*q.eps > 0.0) || !std::isfinite(*q.eps)) {
            throw ValidationError("query.eps must be > 0");
        }
    }
}

LaplaceResult trivial_result() { return {1.0, 0.0, Route::closed_form}; }

/// Integral of (g'(a) + 1) * u(arg(a)) over one cell [a0, a1], where
/// arg(a) = g(a) + a + shift. When `singular` (only for the first cell of
/// sqrt/power boundaries), substitute a = s^m with m = 1/p for sqrt
/// (integrand (c1 + 2s) u(...)) and m = 2/p for power so the transformed
/// integrand is at least C^1 at s = 0.
double cell_integral(LogDerivativeSolver& solver, const BoundarySpec& g,
                     double a0, double a1, double shift, bool singular,
                     double abs_tol, double rel_tol, double* err_out) {
    detail::QuadratureResult r;
    if (!singular) {
        auto f = [&](double a) {
            return (g.derivative(a) + 1.0) * solver.value(g.value(a) + a + shift);
        };
        r = detail::integrate_adaptive(f, a0, a1, abs_tol, rel_tol);
    } else if (g.family == BoundaryFamily::sqrt_family) {
        // a = s^2: (g'(a) + 1) da = (c1 + 2s) ds
        auto f = [&](double s) {
            const double a = s * s;
            return (g.c1 + 2.0 * s) * solver.value(g.c0 + g.c1 * s + a + shift);
        };
        r = detail::integrate_adaptive(f, std::sqrt(a0), std::sqrt(a1), abs_tol,
                                       rel_tol);
    } else {
        // power family, p < 1: a = s^(2/p) makes both terms C^1 in s
        const double m = 2.0 / g.p;
        auto f = [&](double s) {
            const double a = std::pow(s, m);
            const double jac =
                2.0 * g.c1 * s + m * std::pow(s, m - 1.0);  // (g'(a)+1) da/ds
            return jac * solver.value(g.c0 + g.c1 * s * s + a + shift);
        };
        r = detail::integrate_adaptive(f, std::pow(a0, 1.0 / m),
                                       std::pow(a1, 1.0 / m), abs_tol, rel_tol);
    }
    if (err_out) *err_out = r.error;
    return r.value;
}

void check_quadrature(double error, double value_scale, double abs_tol,
                      double rel_tol) {
    if (error > 10.0 * std::max(abs_tol, rel_tol * std::abs(value_scale))) {
        throw QuadratureFailure("quadrature error estimate " +
                                std::to_string(error) + " exceeds tolerance");
    }
}

}  // namespace

const char* route_name(Route r) {
    switch (r) {
        case Route::integral: return "integral";
        case Route::product: return "product";
        case Route::closed_form: return "closed_form";
    }
    return "?";
}

long cell_count(double ell, double eps) {
    const double q = ell / eps;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(r))) {
        return static_cast<long>(r);
    }
    return static_cast<long>(std::floor(q));
}

LaplaceResult limit_lt(const LaplaceQuery& q, const SolverOptions& opts) {
    validate_query(q, false);
    if (q.ell == 0.0) return trivial_result();

    const double g_lo = q.boundary.value(0.0);
    const double g_hi = q.boundary.value(q.ell);
    q.model.require_in_domain(g_lo, "limit_lt");
    q.model.require_in_domain(g_hi, "limit_lt");

    LogDerivativeSolver solver(q.model, q.lambda, opts);
    solver.prepare(g_lo, g_hi);

    const bool singular = q.boundary.has_derivative_singularity();
    detail::QuadratureResult r;
    if (!singular) {
        auto f = [&](double a) {
            return (q.boundary.derivative(a) + 1.0) * solver.value(q.boundary.value(a));
        };
        r = detail::integrate_adaptive(f, 0.0, q.ell, opts.quad_abs_tol,
                                       opts.quad_rel_tol);
    } else if (q.boundary.family == BoundaryFamily::sqrt_family) {
        auto f = [&](double s) {
            return (q.boundary.c1 + 2.0 * s) *
                   solver.value(q.boundary.c0 + q.boundary.c1 * s);
        };
        r = detail::integrate_adaptive(f, 0.0, std::sqrt(q.ell), opts.quad_abs_tol,
                                       opts.quad_rel_tol);
    } else {
        const double m = 2.0 / q.boundary.p;
        auto f = [&](double s) {
            const double jac = 2.0 * q.boundary.c1 * s + m * std::pow(s, m - 1.0);
            return jac * solver.value(q.boundary.c0 + q.boundary.c1 * s * s);
        };
        r = detail::integrate_adaptive(f, 0.0, std::pow(q.ell, 1.0 / m),
                                       opts.quad_abs_tol, opts.quad_rel_tol);
    }
    check_quadrature(r.error, r.value, opts.quad_abs_tol, opts.quad_rel_tol);

    const double value = std::exp(-r.value);
    return {value, value * r.error, Route::integral};
}

namespace detail {

CellExponents discrete_cell_exponents(LogDerivativeSolver& solver,
                                      const BoundarySpec& g, double eps, long n,
                                      const SolverOptions& opts) {
    CellExponents out;
    out.exponents.reserve(static_cast<std::size_t>(n));
    const double cell_abs_tol =
        std::max(opts.quad_abs_tol / std::max<long>(n, 1), 1e-15);
    elastic_reflect::detail::NeumaierSum err_sum;
    for (long k = 1; k <= n; ++k) {
        const double a0 = static_cast<double>(k - 1) * eps;
        const double a1 = static_cast<double>(k) * eps;
        // within cell k the grid shift is a - k*eps
        const double shift = -a1;
        const bool singular = (k == 1) && g.has_derivative_singularity();
        double cell_err = 0.0;
        const double ik = cell_integral(solver, g, a0, a1, shift, singular,
                                        cell_abs_tol, opts.quad_rel_tol, &cell_err);
        out.exponents.push_back(ik);
        err_sum.add(cell_err);
    }
    out.error = err_sum.value();
    return out;
}

}  // namespace detail

LaplaceResult discrete_lt(const LaplaceQuery& q, const SolverOptions& opts) {
    validate_query(q, true);
    const double eps = *q.eps;
    const long n = cell_count(q.ell, eps);
    if (n <= 0) return trivial_result();

    const double span_lo = q.boundary.value(0.0) - eps;
    const double span_hi = q.boundary.value(static_cast<double>(n) * eps);
    q.model.require_in_domain(span_lo, "discrete_lt");
    q.model.require_in_domain(span_hi, "discrete_lt");

    LogDerivativeSolver solver(q.model, q.lambda, opts);
    solver.prepare(span_lo, span_hi);

    auto cells = detail::discrete_cell_exponents(solver, q.boundary, eps, n, opts);
    detail::NeumaierSum total;
    for (double ik : cells.exponents) total.add(ik);
    check_quadrature(cells.error, total.value(), opts.quad_abs_tol,
                     opts.quad_rel_tol);

    const double value = std::exp(-total.value());
    return {value, value * cells.error, Route::integral};
}

LaplaceResult discrete_lt_product(const LaplaceQuery& q,
                                  const SolverOptions& opts) {
    validate_query(q, true);
    const double eps = *q.eps;
    const long n = cell_count(q.ell, eps);
    if (n <= 0) return trivial_result();

    const double span_lo = q.boundary.value(0.0) - eps;
    const double span_hi = q.boundary.value(static_cast<double>(n) * eps);
    q.model.require_in_domain(span_lo, "discrete_lt_product");
    q.model.require_in_domain(span_hi, "discrete_lt_product");

    LogDerivativeSolver solver(q.model, q.lambda, opts);
    solver.prepare(span_lo, span_hi);

    detail::NeumaierSum total;
    detail::NeumaierSum err;
    for (long k = 1; k <= n; ++k) {
        const double l_prev = static_cast<double>(k - 1) * eps;
        const double l_k = static_cast<double>(k) * eps;
        const double lo = q.boundary.value(l_prev) - eps;  // g(l_k - eps) - eps
        const double hi = q.boundary.value(l_k);
        if (lo > hi) {
            throw BoundaryOrder("excursion " + std::to_string(k) +
                                ": start above target despite nondecreasing "
                                "boundary");
        }
        auto [ik, ik_err] = solver.integral_with_error(lo, hi);
        total.add(ik);
        err.add(ik_err);
    }
    const double value = std::exp(-total.value());
    return {value, value * err.value(), Route::product};
}

}  // namespace elastic_reflect
