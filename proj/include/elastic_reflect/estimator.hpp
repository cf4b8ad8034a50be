#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elastic_reflect/laplace.hpp"
#include "elastic_reflect/model.hpp"
#include "elastic_reflect/simulator.hpp"

namespace elastic_reflect {

struct EstimateResult {
    double mean = 0.0;
    double se = 0.0;
};

/// Monte Carlo estimate of E[exp(-lambda tau)] from tau draws (+inf draws
/// contribute 0). se is the sample standard deviation over sqrt(N).
EstimateResult estimate_lt(std::span<const double> tau_samples, double lambda);

/// Two-sample Kolmogorov-Smirnov statistic (takes copies; sorts internally).
double two_sample_ks(std::vector<double> a, std::vector<double> b);

/// Asymptotic two-sample KS critical value at significance alpha.
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

struct ConvergenceRung {
    double eps = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double analytic_discrete = 0.0;  // discrete transform at this eps
    double analytic_limit = 0.0;     // limiting transform (same on every rung)
    double ks_to_next = 0.0;         // KS between tau^eps and tau^{eps/2} draws
    double ucp_sup_median = 0.0;     // median_t of sup |L^eps - L^{eps/2}| (coupled)
    long max_jumps_in_window = 0;    // max jumps of the eps-run in any window
};

struct ConvergenceReport {
    double lambda = 0.0;
    double ell = 0.0;
    double horizon = 0.0;
    std::vector<ConvergenceRung> rungs;
};

struct ConvergenceOptions {
    double T = 1.0;            // horizon for the coupled ucp metric
    long ucp_paths = 0;        // 0 -> same as n_paths
    long ks_draws = 10'000;
    double jump_window = 0.1;  // window length for the jump-count column
    unsigned n_threads = 1;
    LocalTimeMethod mc_method = LocalTimeMethod::excursion_sum;
    SchemeConfig scheme;       // h / bridge settings for path-based parts
};

/// Per-eps ladder of Monte Carlo transform estimates against the discrete
/// and limiting analytic values, plus distributional (KS) and coupled-path
/// (ucp) convergence diagnostics.
ConvergenceReport convergence_study(const ValidatedModel& model,
                                    const BoundarySpec& g, double lambda,
                                    double ell,
                                    const std::vector<double>& eps_ladder,
                                    long n_paths, std::uint64_t seed,
                                    const ConvergenceOptions& opts = {});

/// Couples the jump-reflected path with the free diffusion started at g(0)
/// (upper bound) and with a constant-boundary jump-reflected process
/// (boundary g(0)-eps, start g(0)-2*eps; lower bound), all driven by the
/// same Gaussian increments, and counts node-wise ordering violations beyond
/// a 1e-12 slack. Crossing detection is grid-based (no bridge correction)
/// so the discrete coupling argument applies exactly and the expected count
/// is zero.
long pathwise_comparison_check(const ValidatedModel& model,
                               const BoundarySpec& g, double eps, double h,
                               double T, long n_paths, std::uint64_t seed,
                               unsigned n_threads = 1);

}  // namespace elastic_reflect
