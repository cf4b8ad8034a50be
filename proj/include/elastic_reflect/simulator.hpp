#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elastic_reflect/model.hpp"
#include "elastic_reflect/rng.hpp"

namespace elastic_reflect {

/// Euler scheme configuration for the jump-reflected path sampler.
struct SchemeConfig {
    double eps = 0.1;  // jump size
    double h = 0.0;    // time step; 0 selects sigma*sqrt(h) = eps/4
    double T = 1.0;    // horizon
    bool bridge_correction = true;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    long jump_cap = 10'000'000;
    long max_steps = 2'000'000'000;

    double effective_step(double sigma) const {
        return h > 0.0 ? h : (eps * eps) / (16.0 * sigma * sigma);
    }
    void validate() const;
};

/// Discretized sample of (t, X, L) under the jump-reflection scheme.
///
/// Invariants maintained by the sampler:
///  - l_values is nondecreasing, starts at eps (initial jump at t = 0) and
///    increments by exactly eps at entries of jump_times;
///  - x_values[k] <= g(l_values[k]) at every node;
///  - immediately after a jump, X = g(L_before) - eps and L = L_before + eps.
struct ReflectedPath {
    std::vector<double> times;
    std::vector<double> x_values;
    std::vector<double> l_values;
    std::vector<double> jump_times;  // jump_times[n] is the time L reached (n+1)*eps
    bool aborted = false;
    std::string abort_reason;
};

ReflectedPath simulate_reflected_path(const ValidatedModel& model,
                                      const BoundarySpec& g,
                                      const SchemeConfig& cfg);

/// Options for the Euler fallback used when no exact hitting-time sampler
/// applies (affine drift, or downward constant drift).
struct FallbackOptions {
    double h = 0.0;        // 0 -> step sized from the initial distance
    double time_cap = 1e4; // give up and return +inf past this time
    bool bridge_correction = true;
    long max_steps = 2'000'000'000;
};

struct HittingSampleInfo {
    bool used_path_fallback = false;
    bool non_hitting_drift = false;  // constant drift < 0: hit may never happen
    bool capped = false;             // fallback gave up (returned +inf)
};

/// One draw of the first hitting time of z from x (x <= z).
/// Driftless constant-sigma models use the exact inverse-square-normal law;
/// constant positive drift uses exact inverse-Gaussian sampling; everything
/// else falls back to bridge-corrected Euler simulation.
double sample_hitting_time(const ValidatedModel& model, double x, double z,
                           std::uint64_t seed, std::uint64_t path_index,
                           HittingSampleInfo* info = nullptr,
                           const FallbackOptions& fb = {});

enum class LocalTimeMethod { excursion_sum, path };

/// One draw of tau^eps_ell, either as a sum of independent excursion hitting
/// times (exact in distribution) or extracted from a simulated path.
double sample_inverse_local_time(const ValidatedModel& model,
                                 const BoundarySpec& g, double eps, double ell,
                                 std::uint64_t seed, std::uint64_t path_index,
                                 LocalTimeMethod method,
                                 const SchemeConfig& scheme = {});

namespace detail {

/// Single-step kernel of the jump-reflection scheme. Draws are supplied by
/// the caller (one normal, one uniform per step) so that coupled runs can
/// share noise and counter layouts stay fixed regardless of branching.
class ReflectedStepper {
public:
    ReflectedStepper(const ValidatedModel& model, const BoundarySpec& g,
                     double eps, bool bridge, long jump_cap)
        : model_(&model), g_(&g), eps_(eps), bridge_(bridge), jump_cap_(jump_cap) {
        l_ = eps;
        x_ = g.value(0.0) - eps;
    }

    double t() const { return t_; }
    double x() const { return x_; }
    double l() const { return l_; }
    long jumps() const { return jumps_; }
    bool exited() const { return exited_; }

    /// Advance by h using draws (z, u); returns true if the boundary was hit.
    bool step(double h, double z, double u);

private:
    const ValidatedModel* model_;
    const BoundarySpec* g_;
    double eps_;
    bool bridge_;
    long jump_cap_;
    double t_ = 0.0;
    double x_ = 0.0;
    double l_ = 0.0;
    long jumps_ = 0;
    bool exited_ = false;
};

/// Hitting-time draw consuming from an externally keyed stream.
double sample_hitting_time_with_rng(const ValidatedModel& model, double x,
                                    double z, CounterRng& rng,
                                    HittingSampleInfo* info,
                                    const FallbackOptions& fb);

}  // namespace detail

}  // namespace elastic_reflect
