#include "elastic_reflect/model.hpp"

#include <cmath>
#include <string>

namespace elastic_reflect {

void ValidatedModel::require_in_domain(double x, const char* what) const {
    if (!in_domain(x)) {
        throw OutOfDomain(std::string(what) + ": x=" + std::to_string(x) +
                          " outside window [" + std::to_string(spec.domain_lo) +
                          ", " + std::to_string(spec.domain_hi) + "]");
    }
}

void BoundarySpec::validate() const {
    if (c1 < 0.0) {
        throw ValidationError("boundary: c1 must be >= 0 for a nondecreasing boundary");
    }
    if (family == BoundaryFamily::power && !(p > 0.0 && p <= 1.0)) {
        throw ValidationError("boundary: power exponent must lie in (0, 1]");
    }
    if (!std::isfinite(c0) || !std::isfinite(c1)) {
        throw ValidationError("boundary: coefficients must be finite");
    }
}

ValidatedModel validate_model(const DiffusionModel& model) {
    if (model.sigma0 <= 0.0) {
        throw NonPositiveVolatility("model.vol.sigma0 must be > 0, got " +
                                    std::to_string(model.sigma0));
    }
    if (!(model.domain_lo < model.domain_hi)) {
        throw EmptyDomain("model.domain: lo must be < hi");
    }
    if (!std::isfinite(model.mu) || !std::isfinite(model.alpha) ||
        !std::isfinite(model.beta) || !std::isfinite(model.sigma0)) {
        throw ValidationError("model: coefficients must be finite");
    }
    if (model.drift_family == DriftFamily::affine && model.beta < 0.0) {
        throw ValidationError("model.drift.beta must be >= 0");
    }

    ValidatedModel v;
    v.spec = model;
    v.sigma_min = model.sigma0;
    v.vol_lipschitz = 0.0;
    if (model.drift_family == DriftFamily::constant) {
        v.drift_lipschitz = 0.0;
        v.recurrent = (model.mu == 0.0);
        v.recurrence_warning = !v.recurrent;
    } else {
        v.drift_lipschitz = model.beta;
        // mean reversion (beta > 0) gives recurrence; beta == 0 degenerates
        // to constant drift alpha
        v.recurrent = model.beta > 0.0 || model.alpha == 0.0;
        v.recurrence_warning = !v.recurrent;
    }
    return v;
}

std::pair<double, double> eval_coefficients(const ValidatedModel& model, double x) {
    model.require_in_domain(x, "eval_coefficients");
    return {model.drift(x), model.sigma(x)};
}

std::pair<double, double> eval_boundary(const BoundarySpec& g, double l) {
    if (l < 0.0) {
        throw NegativeLocalTime("eval_boundary: local time must be >= 0, got " +
                                std::to_string(l));
    }
    return {g.value(l), g.derivative(l)};
}

double eval_generator_residual(const ValidatedModel& model, double lambda, double x,
                               double phi, double phi_prime,
                               double phi_double_prime) {
    if (lambda <= 0.0) {
        throw ValidationError("eval_generator_residual: lambda must be > 0");
    }
    model.require_in_domain(x, "eval_generator_residual");
    const double s = model.sigma(x);
    return 0.5 * s * s * phi_double_prime + model.drift(x) * phi_prime -
           lambda * phi;
}

}  // namespace elastic_reflect
