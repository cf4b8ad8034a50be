#pragma once

#include <cmath>

#include "elastic_reflect/laplace.hpp"
#include "elastic_reflect/model.hpp"
#include "elastic_reflect/phi_solver.hpp"

namespace elastic_reflect {

enum class ImpactFamily { constant, exponential, linear };

/// Price-impact multiplier f(y): constant c, exponential exp(eta*y), or
/// linear p + q*y. Must be nondecreasing (and positive for the linear
/// family) on the range the strategy visits; validated on a grid.
struct ImpactFn {
    ImpactFamily family = ImpactFamily::constant;
    double c = 1.0;
    double eta = 0.0;
    double p = 0.0;
    double q = 0.0;

    static ImpactFn constant(double c_) {
        ImpactFn f;
        f.family = ImpactFamily::constant;
        f.c = c_;
        return f;
    }
    static ImpactFn exponential(double eta_) {
        ImpactFn f;
        f.family = ImpactFamily::exponential;
        f.eta = eta_;
        return f;
    }
    static ImpactFn linear(double p_, double q_) {
        ImpactFn f;
        f.family = ImpactFamily::linear;
        f.p = p_;
        f.q = q_;
        return f;
    }

    double value(double y) const {
        switch (family) {
            case ImpactFamily::constant: return c;
            case ImpactFamily::exponential: return std::exp(eta * y);
            case ImpactFamily::linear: return p + q * y;
        }
        return c;
    }

    /// Block-trade price integral: int_0^w f(level - x) dx, in closed form.
    double block_integral(double level, double w) const {
        switch (family) {
            case ImpactFamily::constant: return c * w;
            case ImpactFamily::exponential:
                if (std::abs(eta) < 1e-14) return w;
                return std::exp(eta * level) * (-std::expm1(-eta * w)) / eta;
            case ImpactFamily::linear:
                return (p + q * level) * w - 0.5 * q * w * w;
        }
        return c * w;
    }
};

/// Position unwind against a reflection strategy: sell theta units, with the
/// local time of the boundary-reflected diffusion as the selling schedule,
/// proceeds discounted at rate `discount`.
struct LiquidationProblem {
    ValidatedModel model;
    ImpactFn impact;
    double discount = 0.5;  // > 0
    double position = 1.0;  // theta >= 0
    BoundarySpec boundary;
};

void validate_problem(const LiquidationProblem& problem);

/// Expected proceeds of the continuous reflection strategy:
///   int_0^theta f(g(l)) E[exp(-discount * tau_l)] dl,
/// computed in a single adaptive sweep that accumulates the inner exponent
/// alongside the outer integral.
double continuous_proceeds(const LiquidationProblem& problem,
                           const SolverOptions& opts = {});

/// Discrete block-trade analogue: block n of width min(eps, theta - n*eps)
/// executes at the n-th jump time (block 0 at t = 0, undiscounted), priced
/// by the block integral of f below the pre-jump boundary level g(n*eps)
/// and discounted through the discrete transform at lambda = discount. A
/// final fractional block keeps the liquidated total equal to theta.
double discrete_proceeds(const LiquidationProblem& problem, double eps,
                         const SolverOptions& opts = {});

}  // namespace elastic_reflect
