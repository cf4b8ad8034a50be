#include "elastic_reflect/simulator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "elastic_reflect/detail/summation.hpp"
#include "elastic_reflect/laplace.hpp"

namespace elastic_reflect {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SchemeConfig::validate() const {
    if (!(eps > 0.0)) throw ValidationError("scheme.eps must be > 0");
    if (h < 0.0) throw ValidationError("scheme.h must be >= 0 (0 = auto)");
    if (!(T > 0.0)) throw ValidationError("scheme.T must be > 0");
    if (jump_cap <= 0) throw ValidationError("scheme.jump_cap must be > 0");
}

namespace detail {

bool ReflectedStepper::step(double h, double z, double u) {
    const double b = model_->drift(x_);
    const double s = model_->sigma(x_);
    const double boundary = g_->value(l_);
    const double x_next = x_ + b * h + s * std::sqrt(h) * z;

    bool hit = x_next >= boundary;
    if (!hit && bridge_) {
        // Brownian-bridge crossing probability with coefficients frozen at x
        const double d0 = boundary - x_;
        const double d1 = boundary - x_next;
        if (d0 > 0.0 && d1 > 0.0) {
            const double p = std::exp(-2.0 * d0 * d1 / (s * s * h));
            hit = u < p;
        } else {
            hit = true;  // numerically at the boundary already
        }
    }

    t_ += h;
    if (hit) {
        // pre-jump state snaps to the boundary; the overshoot is discarded
        x_ = boundary - eps_;
        l_ += eps_;
        if (++jumps_ > jump_cap_) {
            throw ExcessiveJumps(
                "jump count exceeded cap " + std::to_string(jump_cap_) +
                "; eps/h are likely mis-scaled");
        }
        return true;
    }
    x_ = x_next;
    if (!model_->in_domain(x_)) exited_ = true;
    return false;
}

}  // namespace detail

ReflectedPath simulate_reflected_path(const ValidatedModel& model,
                                      const BoundarySpec& g,
                                      const SchemeConfig& cfg) {
    cfg.validate();
    g.validate();
    const double h = cfg.effective_step(model.spec.sigma0);
    const long n_full = static_cast<long>(std::floor(cfg.T / h + 1e-9));
    const double h_last = cfg.T - static_cast<double>(n_full) * h;
    const bool has_last = h_last > 1e-12 * std::max(1.0, cfg.T);

    ReflectedPath path;
    path.times.reserve(static_cast<std::size_t>(n_full) + 2);
    path.x_values.reserve(static_cast<std::size_t>(n_full) + 2);
    path.l_values.reserve(static_cast<std::size_t>(n_full) + 2);

    detail::ReflectedStepper stepper(model, g, cfg.eps, cfg.bridge_correction,
                                     cfg.jump_cap);
    CounterRng rng(cfg.seed, cfg.path_index);

    // state after the initial jump away from g(0)
    path.times.push_back(0.0);
    path.x_values.push_back(stepper.x());
    path.l_values.push_back(stepper.l());
    path.jump_times.push_back(0.0);

    const long total_steps = n_full + (has_last ? 1 : 0);
    for (long k = 0; k < total_steps; ++k) {
        const double hk = (k < n_full) ? h : h_last;
        const double z = rng.normal();
        const double u = rng.uniform();
        const bool jumped = stepper.step(hk, z, u);
        path.times.push_back(stepper.t());
        path.x_values.push_back(stepper.x());
        path.l_values.push_back(stepper.l());
        if (jumped) path.jump_times.push_back(stepper.t());
        if (stepper.exited()) {
            path.aborted = true;
            path.abort_reason = "domain exit at t=" + std::to_string(stepper.t()) +
                                ", x=" + std::to_string(stepper.x());
            break;
        }
    }
    return path;
}

namespace detail {

namespace {

double inverse_gaussian_draw(double mean, double shape, CounterRng& rng) {
    const double nu = rng.normal();
    const double y = nu * nu;
    const double x1 = mean + mean * mean * y / (2.0 * shape) -
                      (mean / (2.0 * shape)) *
                          std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
    const double u = rng.uniform();
    return (u <= mean / (mean + x1)) ? x1 : mean * mean / x1;
}

double euler_fallback_hit(const ValidatedModel& model, double x, double z,
                          CounterRng& rng, HittingSampleInfo* info,
                          const FallbackOptions& fb) {
    if (info) info->used_path_fallback = true;
    const double sigma = model.spec.sigma0;
    const double d = z - x;
    double h = fb.h;
    if (h <= 0.0) {
        h = std::min(1e-3, (d * d) / (64.0 * sigma * sigma));
        const double b0 = std::abs(model.drift(x)) + std::abs(model.drift(z));
        if (b0 > 0.0) h = std::min(h, d / (8.0 * b0));
    }

    double t = 0.0;
    double xt = x;
    long steps = 0;
    while (t < fb.time_cap) {
        if (++steps > fb.max_steps) {
            throw NumericError("hitting-time fallback: step budget exhausted");
        }
        const double zdraw = rng.normal();
        const double u = rng.uniform();
        const double b = model.drift(xt);
        const double x_next = xt + b * h + sigma * std::sqrt(h) * zdraw;
        t += h;
        if (x_next >= z) return t;
        if (fb.bridge_correction) {
            const double d0 = z - xt;
            const double d1 = z - x_next;
            const double p = std::exp(-2.0 * d0 * d1 / (sigma * sigma * h));
            if (u < p) return t;
        }
        xt = x_next;
        if (!model.in_domain(xt)) break;  // effectively lost: treat as capped
    }
    if (info) info->capped = true;
    return kInf;
}

}  // namespace

double sample_hitting_time_with_rng(const ValidatedModel& model, double x,
                                    double z, CounterRng& rng,
                                    HittingSampleInfo* info,
                                    const FallbackOptions& fb) {
    if (x > z) {
        throw DescendingHit("sample_hitting_time: start above target");
    }
    if (x == z) return 0.0;

    if (model.constant_coefficients()) {
        const double mu = model.constant_drift();
        const double sigma = model.spec.sigma0;
        const double d = z - x;
        if (mu == 0.0) {
            // first-passage law of driftless BM: T = (d / (sigma Z))^2
            double zn = rng.normal();
            while (zn == 0.0) zn = rng.normal();
            const double r = d / (sigma * zn);
            return r * r;
        }
        if (mu > 0.0) {
            return inverse_gaussian_draw(d / mu, (d * d) / (sigma * sigma), rng);
        }
        if (info) info->non_hitting_drift = true;  // conditional law not implemented
        return euler_fallback_hit(model, x, z, rng, info, fb);
    }
    return euler_fallback_hit(model, x, z, rng, info, fb);
}

}  // namespace detail

double sample_hitting_time(const ValidatedModel& model, double x, double z,
                           std::uint64_t seed, std::uint64_t path_index,
                           HittingSampleInfo* info, const FallbackOptions& fb) {
    CounterRng rng(seed, path_index);
    return detail::sample_hitting_time_with_rng(model, x, z, rng, info, fb);
}

double sample_inverse_local_time(const ValidatedModel& model,
                                 const BoundarySpec& g, double eps, double ell,
                                 std::uint64_t seed, std::uint64_t path_index,
                                 LocalTimeMethod method,
                                 const SchemeConfig& scheme) {
    if (!(eps > 0.0)) throw ValidationError("eps must be > 0");
    if (ell < 0.0) throw NegativeLocalTime("ell must be >= 0");
    g.validate();
    const long n = cell_count(ell, eps);
    if (n <= 0) return 0.0;

    if (method == LocalTimeMethod::excursion_sum) {
        detail::NeumaierSum total;
        for (long k = 1; k <= n; ++k) {
            const double from = g.value(static_cast<double>(k - 1) * eps) - eps;
            const double to = g.value(static_cast<double>(k) * eps);
            CounterRng rng(seed, path_index, static_cast<std::uint64_t>(k));
            const double hk =
                detail::sample_hitting_time_with_rng(model, from, to, rng, nullptr, {});
            if (std::isinf(hk)) return kInf;
            total.add(hk);
        }
        return total.value();
    }

    // path method: run the scheme until the discrete local time exceeds ell.
    // Draws beyond the scheme horizon T are censored to +inf (hitting times
    // of driftless models have infinite mean, so an uncapped loop would
    // not terminate in expectation); pick T so that exp(-lambda*T) is
    // negligible for the transform being estimated.
    SchemeConfig cfg = scheme;
    cfg.eps = eps;
    cfg.seed = seed;
    cfg.path_index = path_index;
    const double h = cfg.effective_step(model.spec.sigma0);
    detail::ReflectedStepper stepper(model, g, eps, cfg.bridge_correction,
                                     cfg.jump_cap);
    CounterRng rng(seed, path_index);
    long steps = 0;
    while (stepper.jumps() < n) {
        if (stepper.t() >= cfg.T) return kInf;
        if (++steps > cfg.max_steps) {
            throw NumericError("sample_inverse_local_time: step budget exhausted");
        }
        const double z = rng.normal();
        const double u = rng.uniform();
        stepper.step(h, z, u);
        if (stepper.exited()) {
            throw NumericError(
                "sample_inverse_local_time: path left the model window at t=" +
                std::to_string(stepper.t()));
        }
    }
    return stepper.t();
}

}  // namespace elastic_reflect
