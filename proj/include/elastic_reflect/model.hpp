#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "elastic_reflect/errors.hpp"

namespace elastic_reflect {

enum class DriftFamily { constant, affine };  // b(x) = mu, or b(x) = alpha - beta*x
enum class VolFamily { constant };            // sigma(x) = sigma0

/// One-dimensional diffusion dX = b(X)dt + sigma(X)dW on a truncation
/// window [domain_lo, domain_hi]. Coefficient families are restricted so
/// Lipschitz constants and recurrence can be certified exactly.
struct DiffusionModel {
    DriftFamily drift_family = DriftFamily::constant;
    double mu = 0.0;     // constant drift
    double alpha = 0.0;  // affine drift intercept
    double beta = 0.0;   // affine drift mean-reversion rate (>= 0)
    VolFamily vol_family = VolFamily::constant;
    double sigma0 = 1.0;
    double domain_lo = -50.0;
    double domain_hi = 50.0;

    static DiffusionModel brownian(double mu_, double sigma_, double lo = -50.0,
                                   double hi = 50.0) {
        DiffusionModel m;
        m.drift_family = DriftFamily::constant;
        m.mu = mu_;
        m.sigma0 = sigma_;
        m.domain_lo = lo;
        m.domain_hi = hi;
        return m;
    }
    static DiffusionModel ornstein_uhlenbeck(double alpha_, double beta_,
                                             double sigma_, double lo = -50.0,
                                             double hi = 50.0) {
        DiffusionModel m;
        m.drift_family = DriftFamily::affine;
        m.alpha = alpha_;
        m.beta = beta_;
        m.sigma0 = sigma_;
        m.domain_lo = lo;
        m.domain_hi = hi;
        return m;
    }
};

/// DiffusionModel plus certified regularity data. Immutable after
/// validation; safe to share across threads.
struct ValidatedModel {
    DiffusionModel spec;
    double sigma_min = 0.0;
    double drift_lipschitz = 0.0;
    double vol_lipschitz = 0.0;
    bool recurrent = false;
    // set when a constant nonzero drift is accepted despite breaking recurrence
    bool recurrence_warning = false;

    double drift(double x) const {
        return spec.drift_family == DriftFamily::constant ? spec.mu
                                                          : spec.alpha - spec.beta * x;
    }
    double sigma(double /*x*/) const { return spec.sigma0; }

    /// True when b is constant over the whole line (constant family, or
    /// affine with beta == 0), enabling closed-form eigenfunction ratios.
    bool constant_coefficients() const {
        return spec.drift_family == DriftFamily::constant || spec.beta == 0.0;
    }
    /// The constant drift value; only meaningful if constant_coefficients().
    double constant_drift() const {
        return spec.drift_family == DriftFamily::constant ? spec.mu : spec.alpha;
    }

    bool in_domain(double x) const {
        return x >= spec.domain_lo && x <= spec.domain_hi;
    }
    void require_in_domain(double x, const char* what) const;
};

enum class BoundaryFamily { constant, linear, sqrt_family, power };

/// Nondecreasing elastic boundary g(l) as a function of accumulated local
/// time. g' may be +infinity at l = 0 for the sqrt/power families; the
/// integral of g' over [0, l] stays finite and integrators remove the
/// singularity by substitution.
struct BoundarySpec {
    BoundaryFamily family = BoundaryFamily::constant;
    double c0 = 0.0;
    double c1 = 0.0;  // slope / scale, >= 0 for monotonicity
    double p = 1.0;   // power exponent in (0, 1]

    static BoundarySpec constant(double a) { return {BoundaryFamily::constant, a, 0.0, 1.0}; }
    static BoundarySpec linear(double c0_, double c1_) {
        return {BoundaryFamily::linear, c0_, c1_, 1.0};
    }
    static BoundarySpec sqrt(double c0_, double c1_) {
        return {BoundaryFamily::sqrt_family, c0_, c1_, 0.5};
    }
    static BoundarySpec power(double c0_, double c1_, double p_) {
        return {BoundaryFamily::power, c0_, c1_, p_};
    }

    double value(double l) const {
        switch (family) {
            case BoundaryFamily::constant: return c0;
            case BoundaryFamily::linear: return c0 + c1 * l;
            case BoundaryFamily::sqrt_family: return c0 + c1 * std::sqrt(l);
            case BoundaryFamily::power: return c0 + c1 * std::pow(l, p);
        }
        return c0;
    }

    /// g'(l); +infinity sentinel at l = 0 for the singular families.
    double derivative(double l) const {
        switch (family) {
            case BoundaryFamily::constant: return 0.0;
            case BoundaryFamily::linear: return c1;
            case BoundaryFamily::sqrt_family:
                if (c1 == 0.0) return 0.0;
                if (l == 0.0) return std::numeric_limits<double>::infinity();
                return 0.5 * c1 / std::sqrt(l);
            case BoundaryFamily::power:
                if (c1 == 0.0) return 0.0;
                if (p == 1.0) return c1;
                if (l == 0.0) return std::numeric_limits<double>::infinity();
                return c1 * p * std::pow(l, p - 1.0);
        }
        return 0.0;
    }

    /// Effective power exponent: 1 for constant/linear, p otherwise.
    double singular_exponent() const {
        if (family == BoundaryFamily::sqrt_family) return 0.5;
        if (family == BoundaryFamily::power) return p;
        return 1.0;
    }
    bool has_derivative_singularity() const {
        return c1 > 0.0 && singular_exponent() < 1.0;
    }

    void validate() const;
};

/// Checks the standing assumptions (positive volatility, nonempty window)
/// and annotates the model with Lipschitz constants and a recurrence flag.
/// Idempotent: validating a ValidatedModel's spec reproduces it.
ValidatedModel validate_model(const DiffusionModel& model);

/// (b(x), sigma(x)); x must lie in the truncation window.
std::pair<double, double> eval_coefficients(const ValidatedModel& model, double x);

/// (g(l), g'(l)); g'(0) is a +infinity sentinel for singular families.
std::pair<double, double> eval_boundary(const BoundarySpec& g, double l);

/// Residual (1/2) sigma(x)^2 phi'' + b(x) phi' - lambda * phi of the
/// eigenvalue equation at x; zero iff the triple solves it there.
double eval_generator_residual(const ValidatedModel& model, double lambda, double x,
                               double phi, double phi_prime, double phi_double_prime);

}  // namespace elastic_reflect
