#pragma once

#include <optional>
#include <utility>

#include "elastic_reflect/detail/ode.hpp"
#include "elastic_reflect/model.hpp"

namespace elastic_reflect {

struct SolverOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // quadrature tolerances for integrals of u
    double quad_abs_tol = 1e-13;
    double quad_rel_tol = 1e-12;
    // tolerances of outer adaptive sweeps built on top of the solver
    // (proceeds functionals)
    double sweep_rel_tol = 1e-10;
    double sweep_abs_tol = 1e-13;
    int max_anchor_refinements = 8;
    // dense-output node spacing cap inside the cached range
    double max_step = 1.0 / 256.0;
    // run the Riccati integrator even when an algebraic root is available
    bool force_integration = false;
};

/// Log-derivative u = Phi'/Phi of the positive increasing solution of the
/// eigenvalue equation (1/2) sigma^2 Phi'' + b Phi' = lambda Phi.
///
/// Phi itself is defined only up to a constant factor and can overflow, so
/// the solver never materializes it: hitting-time transforms consume only u
/// and integrals of u. u satisfies the Riccati equation
///     u' = 2 (lambda - b(x) u) / sigma(x)^2 - u^2,
/// and the increasing solution is selected by starting at a far-left anchor
/// from the frozen-coefficient positive root, which the flow attracts to;
/// the anchor is pushed left until the value at the requested range is
/// stable to rel_tol.
///
/// Constant-coefficient models short-circuit to the exact algebraic root
/// unless force_integration is set.
///
/// Single-writer: value()/integral() may rebuild the cache when queried
/// outside the prepared range. Use one instance per thread.
class LogDerivativeSolver {
public:
    LogDerivativeSolver(const ValidatedModel& model, double lambda,
                        const SolverOptions& opts = {});

    double lambda() const { return lambda_; }
    const ValidatedModel& model() const { return model_; }

    /// Make the cache cover [x_lo, x_hi] (no-op in closed-form mode).
    void prepare(double x_lo, double x_hi);

    double value(double x);

    /// (u, u') with u' taken from the dense-output interpolant, not from the
    /// Riccati right-hand side, so residual checks are meaningful.
    std::pair<double, double> value_with_derivative(double x);

    /// Integral of u over [x, z], x <= z.
    double integral(double x, double z);

    /// Integral plus its quadrature error estimate (0 in closed-form mode).
    std::pair<double, double> integral_with_error(double x, double z);

    bool closed_form_active() const { return closed_form_; }

    /// Positive root of (1/2) sigma^2 u^2 + b(x) u = lambda with coefficients
    /// frozen at x.
    double frozen_root(double x) const;

    /// Dense cache for diagnostics/tests; nullptr in closed-form mode.
    const detail::OdeSolution<1>* solution() const {
        return solution_ ? &*solution_ : nullptr;
    }
    double prepared_lo() const { return prepared_lo_; }
    double prepared_hi() const { return prepared_hi_; }

private:
    void rebuild(double x_lo, double x_hi);
    void ensure(double x_lo, double x_hi);

    ValidatedModel model_;
    double lambda_;
    SolverOptions opts_;
    bool closed_form_;
    double const_root_ = 0.0;
    std::optional<detail::OdeSolution<1>> solution_;
    double prepared_lo_ = 0.0;
    double prepared_hi_ = 0.0;
};

/// u_lambda(x) for a one-off query.
double log_derivative(const ValidatedModel& model, double lambda, double x,
                      const SolverOptions& opts = {});

/// Integral of u_lambda over [x, z], x <= z.
double log_derivative_integral(const ValidatedModel& model, double lambda,
                               double x, double z, const SolverOptions& opts = {});

/// Laplace transform E_x[exp(-lambda T_z)] of the first hitting time of z
/// from x <= z, as exp(-integral of u). The descending case is out of scope.
double hitting_lt(const ValidatedModel& model, double lambda, double x, double z,
                  const SolverOptions& opts = {});

}  // namespace elastic_reflect
