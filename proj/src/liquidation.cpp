#include "elastic_reflect/liquidation.hpp"

#include <array>
#include <cmath>
#include <string>

#include "elastic_reflect/detail/ode.hpp"
#include "elastic_reflect/detail/summation.hpp"

namespace elastic_reflect {

void validate_problem(const LiquidationProblem& problem) {
    if (!(problem.discount > 0.0)) {
        throw ValidationError("liquidation: discount must be > 0");
    }
    if (!(problem.position >= 0.0)) {
        throw ValidationError("liquidation: position must be >= 0");
    }
    problem.boundary.validate();

    // f must be nondecreasing (and positive for the linear family) on the
    // price range the strategy can visit
    const double lo = problem.boundary.value(0.0) - problem.position - 1.0;
    const double hi = problem.boundary.value(problem.position);
    const int n_grid = 257;
    double prev = problem.impact.value(lo);
    for (int i = 1; i < n_grid; ++i) {
        const double y = lo + (hi - lo) * static_cast<double>(i) / (n_grid - 1);
        const double fy = problem.impact.value(y);
        const double slack = 1e-12 * (1.0 + std::abs(fy));
        if (fy < prev - slack) {
            throw ValidationError(
                "liquidation: impact function decreasing near y=" +
                std::to_string(y));
        }
        if (problem.impact.family == ImpactFamily::linear && fy <= 0.0) {
            throw ValidationError(
                "liquidation: linear impact non-positive near y=" +
                std::to_string(y));
        }
        prev = fy;
    }
}

double continuous_proceeds(const LiquidationProblem& problem,
                           const SolverOptions& opts) {
    validate_problem(problem);
    const double theta = problem.position;
    if (theta == 0.0) return 0.0;

    const BoundarySpec& g = problem.boundary;
    const double g_lo = g.value(0.0);
    const double g_hi = g.value(theta);
    problem.model.require_in_domain(g_lo, "continuous_proceeds");
    problem.model.require_in_domain(g_hi, "continuous_proceeds");

    LogDerivativeSolver solver(problem.model, problem.discount, opts);
    solver.prepare(g_lo, g_hi);

    // joint sweep of (I, P): I(l) = int_0^l (g'+1) u(g), P = int f(g) e^{-I}
    detail::OdeOptions ode_opts;
    ode_opts.rel_tol = opts.sweep_rel_tol;
    ode_opts.abs_tol = opts.sweep_abs_tol;
    ode_opts.record_from = std::numeric_limits<double>::infinity();  // endpoint only

    std::array<double, 2> y0 = {0.0, 0.0};
    detail::OdeSolution<2> sweep;
    if (!g.has_derivative_singularity()) {
        auto rhs = [&](double l, const std::array<double, 2>& y,
                       std::array<double, 2>& dy) {
            const double gl = g.value(l);
            dy[0] = (g.derivative(l) + 1.0) * solver.value(gl);
            dy[1] = problem.impact.value(gl) * std::exp(-y[0]);
        };
        sweep = detail::integrate_dopri5<2>(rhs, 0.0, theta, y0, ode_opts);
    } else if (g.family == BoundaryFamily::sqrt_family) {
        // l = s^2
        auto rhs = [&](double s, const std::array<double, 2>& y,
                       std::array<double, 2>& dy) {
            const double gl = g.c0 + g.c1 * s;
            dy[0] = (g.c1 + 2.0 * s) * solver.value(gl);
            dy[1] = problem.impact.value(gl) * std::exp(-y[0]) * 2.0 * s;
        };
        sweep = detail::integrate_dopri5<2>(rhs, 0.0, std::sqrt(theta), y0,
                                            ode_opts);
    } else {
        // power family, p < 1: l = s^m with m = 2/p keeps the sweep C^1
        const double m = 2.0 / g.p;
        auto rhs = [&](double s, const std::array<double, 2>& y,
                       std::array<double, 2>& dy) {
            const double gl = g.c0 + g.c1 * s * s;
            const double dl = m * std::pow(s, m - 1.0);
            dy[0] = (2.0 * g.c1 * s + dl) * solver.value(gl);
            dy[1] = problem.impact.value(gl) * std::exp(-y[0]) * dl;
        };
        sweep = detail::integrate_dopri5<2>(rhs, 0.0, std::pow(theta, 1.0 / m),
                                            y0, ode_opts);
    }
    return sweep.node_y(sweep.size() - 1)[1];
}

double discrete_proceeds(const LiquidationProblem& problem, double eps,
                         const SolverOptions& opts) {
    validate_problem(problem);
    const double theta = problem.position;
    if (theta == 0.0) return 0.0;
    if (!(eps > 0.0)) throw ValidationError("liquidation: eps must be > 0");
    if (eps > theta * (1.0 + 1e-9)) {
        throw ValidationError("liquidation: eps must be <= theta");
    }

    const BoundarySpec& g = problem.boundary;
    const long n_full = cell_count(theta, eps);
    const double remainder = theta - static_cast<double>(n_full) * eps;
    const bool fractional = remainder > 1e-12 * std::max(1.0, theta);
    const long n_blocks = n_full + (fractional ? 1 : 0);

    const double span_lo = g.value(0.0) - eps;
    const double span_hi = g.value(static_cast<double>(n_blocks - 1) * eps);
    problem.model.require_in_domain(span_lo, "discrete_proceeds");
    problem.model.require_in_domain(span_hi, "discrete_proceeds");

    LogDerivativeSolver solver(problem.model, problem.discount, opts);
    solver.prepare(span_lo, span_hi);

    // prefix exponents: P_n = exp(-sum_{k<=n} I_k), P_0 = 1
    auto cells =
        detail::discrete_cell_exponents(solver, g, eps, n_blocks - 1, opts);

    detail::NeumaierSum proceeds;
    detail::NeumaierSum exponent;
    for (long n = 0; n < n_blocks; ++n) {
        if (n > 0) exponent.add(cells.exponents[static_cast<std::size_t>(n - 1)]);
        const double discount_factor = (n == 0) ? 1.0 : std::exp(-exponent.value());
        const double width = (n < n_full) ? eps : remainder;
        const double level = g.value(static_cast<double>(n) * eps);
        proceeds.add(discount_factor * problem.impact.block_integral(level, width));
    }
    return proceeds.value();
}

}  // namespace elastic_reflect
