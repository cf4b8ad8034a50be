#include "elastic_reflect/phi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elastic_reflect/detail/quadrature.hpp"

namespace elastic_reflect {

namespace {

void require_positive_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("lambda must be > 0, got " + std::to_string(lambda));
    }
}

}  // namespace

LogDerivativeSolver::LogDerivativeSolver(const ValidatedModel& model,
                                         double lambda, const SolverOptions& opts)
    : model_(model), lambda_(lambda), opts_(opts) {
    require_positive_lambda(lambda);
    closed_form_ = model.constant_coefficients() && !opts.force_integration;
    if (model.constant_coefficients()) {
        const_root_ = frozen_root(0.0);
    }
}

double LogDerivativeSolver::frozen_root(double x) const {
    const double b = model_.drift(x);
    const double s2 = model_.sigma(x) * model_.sigma(x);
    // 2*lambda / (b + sqrt(b^2 + 2 lambda sigma^2)) avoids cancellation for b > 0
    return 2.0 * lambda_ / (b + std::sqrt(b * b + 2.0 * lambda_ * s2));
}

void LogDerivativeSolver::rebuild(double x_lo, double x_hi) {
    const double sigma = model_.spec.sigma0;
    const double base_offset = 4.0 * std::max(1.0, sigma / std::sqrt(2.0 * lambda_));

    auto rhs = [this](double x, const std::array<double, 1>& y,
                      std::array<double, 1>& dydx) {
        const double s2 = model_.sigma(x) * model_.sigma(x);
        const double u = y[0];
        dydx[0] = 2.0 * (lambda_ - model_.drift(x) * u) / s2 - u * u;
    };

    detail::OdeOptions ode_opts;
    ode_opts.rel_tol = opts_.rel_tol;
    ode_opts.abs_tol = opts_.abs_tol;
    // The dense-output residual grows like (h^3) * sigma^2 * d^4u/dx^4, and
    // the curvature of u scales with the drift slope over sigma^2, so the
    // node spacing shrinks with beta/sigma^2 (and with small lambda, whose
    // residual budget is proportionally tighter).
    const double coeff_scale =
        sigma * sigma / (1.0 + model_.drift_lipschitz);
    const double lambda_scale = std::cbrt(std::min(1.0, lambda_));
    ode_opts.max_step = std::max(
        1.0 / 4096.0,
        opts_.max_step * std::min(1.0, coeff_scale * lambda_scale));
    ode_opts.record_from = x_lo;

    double prev_value = 0.0;
    bool have_prev = false;
    for (int k = 0; k <= opts_.max_anchor_refinements; ++k) {
        const double anchor = x_lo - base_offset * static_cast<double>(1 << k);
        const std::array<double, 1> u0 = {frozen_root(anchor)};
        auto sol = detail::integrate_dopri5<1>(rhs, anchor, x_hi, u0, ode_opts);
        const double v = sol.eval(x_lo)[0];
        if (!std::isfinite(v)) {
            throw NonPositive("log-derivative integration produced a non-finite value");
        }
        if (have_prev &&
            std::abs(v - prev_value) <= opts_.rel_tol * std::abs(v) + opts_.abs_tol) {
            for (std::size_t i = 0; i < sol.size(); ++i) {
                if (!(sol.node_y(i)[0] > 0.0)) {
                    throw NonPositive(
                        "log-derivative crossed zero at x=" +
                        std::to_string(sol.node_x(i)) +
                        "; tolerances too loose for this model");
                }
            }
            solution_ = std::move(sol);
            prepared_lo_ = x_lo;
            prepared_hi_ = x_hi;
            return;
        }
        prev_value = v;
        have_prev = true;
    }
    throw AnchorDivergence(
        "left anchor refinement did not stabilize after " +
        std::to_string(opts_.max_anchor_refinements) + " doublings (lambda=" +
        std::to_string(lambda_) + ")");
}

void LogDerivativeSolver::ensure(double x_lo, double x_hi) {
    if (closed_form_) return;
    if (solution_ && prepared_lo_ <= x_lo && prepared_hi_ >= x_hi) return;
    const double lo = solution_ ? std::min(prepared_lo_, x_lo) : x_lo;
    const double hi = solution_ ? std::max(prepared_hi_, x_hi) : x_hi;
    rebuild(lo, hi);
}

void LogDerivativeSolver::prepare(double x_lo, double x_hi) {
    if (x_lo > x_hi) std::swap(x_lo, x_hi);
    ensure(x_lo, x_hi);
}

double LogDerivativeSolver::value(double x) {
    if (closed_form_) return const_root_;
    ensure(x, x);
    const double u = solution_->eval(x)[0];
    if (!(u > 0.0)) {
        throw NonPositive("log-derivative non-positive at x=" + std::to_string(x));
    }
    return u;
}

std::pair<double, double> LogDerivativeSolver::value_with_derivative(double x) {
    if (closed_form_) return {const_root_, 0.0};
    ensure(x, x);
    auto [y, dy] = solution_->eval_with_derivative(x);
    return {y[0], dy[0]};
}

double LogDerivativeSolver::integral(double x, double z) {
    return integral_with_error(x, z).first;
}

std::pair<double, double> LogDerivativeSolver::integral_with_error(double x,
                                                                   double z) {
    if (z < x) {
        throw DescendingHit("integral of u requires x <= z (x=" +
                            std::to_string(x) + ", z=" + std::to_string(z) + ")");
    }
    if (x == z) return {0.0, 0.0};
    if (closed_form_) return {const_root_ * (z - x), 0.0};
    ensure(x, z);
    auto result = detail::integrate_adaptive(
        [this](double y) { return solution_->eval(y)[0]; }, x, z,
        opts_.quad_abs_tol, opts_.quad_rel_tol);
    return {result.value, result.error};
}

double log_derivative(const ValidatedModel& model, double lambda, double x,
                      const SolverOptions& opts) {
    model.require_in_domain(x, "log_derivative");
    LogDerivativeSolver solver(model, lambda, opts);
    solver.prepare(x, x);
    return solver.value(x);
}

double log_derivative_integral(const ValidatedModel& model, double lambda,
                               double x, double z, const SolverOptions& opts) {
    model.require_in_domain(x, "log_derivative_integral");
    model.require_in_domain(z, "log_derivative_integral");
    LogDerivativeSolver solver(model, lambda, opts);
    solver.prepare(x, z);
    return solver.integral(x, z);
}

double hitting_lt(const ValidatedModel& model, double lambda, double x, double z,
                  const SolverOptions& opts) {
    require_positive_lambda(lambda);
    if (z < x) {
        throw DescendingHit("hitting_lt: target below start (only ascending hits "
                            "are supported)");
    }
    if (x == z) return 1.0;
    return std::exp(-log_derivative_integral(model, lambda, x, z, opts));
}

}  // namespace elastic_reflect
