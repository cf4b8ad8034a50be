#include "elastic_reflect/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elastic_reflect/detail/parallel.hpp"
#include "elastic_reflect/detail/summation.hpp"

namespace elastic_reflect {

namespace {

// Disjoint stream blocks so every sampling purpose within a study owns its
// own path-index range, independent of rung order and thread count.
std::uint64_t stream_id(std::uint64_t rung, std::uint64_t purpose,
                        std::uint64_t index) {
    return ((rung * 8 + purpose) << 40) + index;
}

struct CoupledUcpResult {
    double sup_l_gap = 0.0;
    long max_jumps_in_window = 0;
};

/// Runs the eps- and eps/2-schemes on shared noise over [0, T] and records
/// the sup of |L^eps - L^{eps/2}| plus the busiest jump window of the
/// eps-run.
CoupledUcpResult coupled_ucp_path(const ValidatedModel& model,
                                  const BoundarySpec& g, double eps, double T,
                                  double h, bool bridge, long jump_cap,
                                  double jump_window, std::uint64_t seed,
                                  std::uint64_t stream) {
    detail::ReflectedStepper coarse(model, g, eps, bridge, jump_cap);
    detail::ReflectedStepper fine(model, g, 0.5 * eps, bridge, jump_cap);
    CounterRng rng(seed, stream);

    std::vector<double> jump_times;
    CoupledUcpResult out;
    out.sup_l_gap = std::abs(coarse.l() - fine.l());

    const long n_steps = static_cast<long>(std::floor(T / h + 1e-9));
    for (long k = 0; k < n_steps; ++k) {
        const double z = rng.normal();
        const double u = rng.uniform();
        if (coarse.step(h, z, u)) jump_times.push_back(coarse.t());
        fine.step(h, z, u);
        out.sup_l_gap = std::max(out.sup_l_gap, std::abs(coarse.l() - fine.l()));
        if (coarse.exited() || fine.exited()) break;
    }

    // busiest jump window (two-pointer sweep over the sorted jump ledger)
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < jump_times.size(); ++hi) {
        while (jump_times[hi] - jump_times[lo] > jump_window) ++lo;
        out.max_jumps_in_window =
            std::max(out.max_jumps_in_window, static_cast<long>(hi - lo + 1));
    }
    return out;
}

double median_inplace(std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    double m = xs[mid];
    if (xs.size() % 2 == 0) {
        const double lower = *std::max_element(xs.begin(), xs.begin() + mid);
        m = 0.5 * (m + lower);
    }
    return m;
}

}  // namespace

EstimateResult estimate_lt(std::span<const double> tau_samples, double lambda) {
    if (tau_samples.empty()) {
        throw EmptySamples("estimate_lt: no samples");
    }
    if (!(lambda > 0.0)) {
        throw ValidationError("estimate_lt: lambda must be > 0");
    }
    detail::NeumaierSum sum;
    for (double tau : tau_samples) {
        sum.add(std::isinf(tau) ? 0.0 : std::exp(-lambda * tau));
    }
    const double n = static_cast<double>(tau_samples.size());
    const double mean = sum.value() / n;

    double se = 0.0;
    if (tau_samples.size() > 1) {
        detail::NeumaierSum ss;
        for (double tau : tau_samples) {
            const double v = (std::isinf(tau) ? 0.0 : std::exp(-lambda * tau)) - mean;
            ss.add(v * v);
        }
        se = std::sqrt(ss.value() / (n - 1.0)) / std::sqrt(n);
    }
    return {mean, se};
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw EmptySamples("two_sample_ks: empty sample set");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    return c * std::sqrt((nd + md) / (nd * md));
}

ConvergenceReport convergence_study(const ValidatedModel& model,
                                    const BoundarySpec& g, double lambda,
                                    double ell,
                                    const std::vector<double>& eps_ladder,
                                    long n_paths, std::uint64_t seed,
                                    const ConvergenceOptions& opts) {
    if (eps_ladder.empty()) {
        throw ValidationError("convergence_study: empty eps ladder");
    }
    for (std::size_t i = 1; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] < eps_ladder[i - 1])) {
            throw ValidationError("convergence_study: eps ladder must be strictly "
                                  "decreasing");
        }
    }
    for (double eps : eps_ladder) {
        const double q = ell / eps;
        if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, std::round(q))) {
            throw ValidationError("convergence_study: eps=" + std::to_string(eps) +
                                  " does not divide ell=" + std::to_string(ell));
        }
    }
    if (n_paths < 1) throw EmptySamples("convergence_study: n_paths must be >= 1");

    ConvergenceReport report;
    report.lambda = lambda;
    report.ell = ell;
    report.horizon = opts.T;

    LaplaceQuery base{model, g, lambda, ell, std::nullopt};
    const double analytic_limit = limit_lt(base).value;

    const long ucp_paths = opts.ucp_paths > 0 ? opts.ucp_paths : n_paths;

    for (std::size_t r = 0; r < eps_ladder.size(); ++r) {
        const double eps = eps_ladder[r];
        ConvergenceRung rung;
        rung.eps = eps;
        rung.analytic_limit = analytic_limit;
        LaplaceQuery qd = base;
        qd.eps = eps;
        rung.analytic_discrete = discrete_lt(qd).value;

        // MC transform estimate
        std::vector<double> draws(static_cast<std::size_t>(n_paths));
        detail::parallel_for(
            static_cast<std::uint64_t>(n_paths), opts.n_threads,
            [&](std::uint64_t i) {
                draws[i] = sample_inverse_local_time(
                    model, g, eps, ell, seed, stream_id(r, 0, i), opts.mc_method,
                    opts.scheme);
            });
        const auto est = estimate_lt(draws, lambda);
        rung.mc_mean = est.mean;
        rung.mc_se = est.se;

        // distributional gap to the half-step scheme
        std::vector<double> ks_a(static_cast<std::size_t>(opts.ks_draws));
        std::vector<double> ks_b(static_cast<std::size_t>(opts.ks_draws));
        detail::parallel_for(
            static_cast<std::uint64_t>(opts.ks_draws), opts.n_threads,
            [&](std::uint64_t i) {
                ks_a[i] = sample_inverse_local_time(model, g, eps, ell, seed,
                                                    stream_id(r, 1, i),
                                                    opts.mc_method, opts.scheme);
                ks_b[i] = sample_inverse_local_time(model, g, 0.5 * eps, ell, seed,
                                                    stream_id(r, 2, i),
                                                    opts.mc_method, opts.scheme);
            });
        rung.ks_to_next = two_sample_ks(std::move(ks_a), std::move(ks_b));

        // coupled ucp proxy at the finer scheme's natural step
        const double h_couple = opts.scheme.h > 0.0
                                    ? opts.scheme.h
                                    : (0.25 * eps * eps) /
                                          (16.0 * model.spec.sigma0 *
                                           model.spec.sigma0);
        std::vector<double> sups(static_cast<std::size_t>(ucp_paths));
        std::vector<long> window_jumps(static_cast<std::size_t>(ucp_paths));
        detail::parallel_for(
            static_cast<std::uint64_t>(ucp_paths), opts.n_threads,
            [&](std::uint64_t i) {
                auto res = coupled_ucp_path(model, g, eps, opts.T, h_couple,
                                            opts.scheme.bridge_correction,
                                            opts.scheme.jump_cap,
                                            opts.jump_window, seed,
                                            stream_id(r, 3, i));
                sups[i] = res.sup_l_gap;
                window_jumps[i] = res.max_jumps_in_window;
            });
        rung.ucp_sup_median = median_inplace(sups);
        rung.max_jumps_in_window =
            *std::max_element(window_jumps.begin(), window_jumps.end());

        report.rungs.push_back(rung);
    }
    return report;
}

long pathwise_comparison_check(const ValidatedModel& model,
                               const BoundarySpec& g, double eps, double h,
                               double T, long n_paths, std::uint64_t seed,
                               unsigned n_threads) {
    if (n_paths <= 0) {
        throw EmptySamples("pathwise_comparison_check: n_paths must be > 0");
    }
    if (!(eps > 0.0) || !(h > 0.0) || !(T > 0.0)) {
        throw ValidationError("pathwise_comparison_check: eps, h, T must be > 0");
    }
    g.validate();

    constexpr double kSlack = 1e-12;
    const long n_steps = static_cast<long>(std::floor(T / h + 1e-9));
    const BoundarySpec low_boundary = BoundarySpec::constant(g.value(0.0) - eps);

    std::vector<long> per_path(static_cast<std::size_t>(n_paths), 0);
    detail::parallel_for(
        static_cast<std::uint64_t>(n_paths), n_threads, [&](std::uint64_t i) {
            // grid-based crossing detection only: bridge events could snap X
            // above the coupled free path and spoil the exact ordering
            detail::ReflectedStepper reflected(model, g, eps, false,
                                               10'000'000);
            detail::ReflectedStepper lower(model, low_boundary, eps, false,
                                           10'000'000);
            double y_free = g.value(0.0);
            CounterRng rng(seed, i);
            long violations = 0;
            for (long k = 0; k < n_steps; ++k) {
                const double z = rng.normal();
                const double b = model.drift(y_free);
                const double s = model.sigma(y_free);
                y_free += b * h + s * std::sqrt(h) * z;
                reflected.step(h, z, 0.0);
                lower.step(h, z, 0.0);
                if (reflected.x() > y_free + kSlack) ++violations;
                if (reflected.x() < lower.x() - kSlack) ++violations;
                if (reflected.exited() || lower.exited() ||
                    !model.in_domain(y_free)) {
                    break;
                }
            }
            per_path[i] = violations;
        });

    long total = 0;
    for (long v : per_path) total += v;
    return total;
}

}  // namespace elastic_reflect
