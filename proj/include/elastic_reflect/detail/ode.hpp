#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "elastic_reflect/errors.hpp"

namespace elastic_reflect::detail {

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // Upper bound on the step size inside the recorded range. Keeps the
    // Hermite dense output tight enough for downstream residual checks.
    double max_step = std::numeric_limits<double>::infinity();
    // Nodes are only stored for x >= record_from (the approach from a far
    // anchor does not need dense output).
    double record_from = -std::numeric_limits<double>::infinity();
    long max_steps = 20'000'000;
};

/// Piecewise cubic Hermite representation of an ODE solution on [x_front, x_back].
template <std::size_t N>
class OdeSolution {
public:
    using State = std::array<double, N>;

    void append(double x, const State& y, const State& f) {
        xs_.push_back(x);
        ys_.push_back(y);
        fs_.push_back(f);
    }

    bool empty() const { return xs_.empty(); }
    double x_front() const { return xs_.front(); }
    double x_back() const { return xs_.back(); }
    std::size_t size() const { return xs_.size(); }
    double node_x(std::size_t i) const { return xs_[i]; }
    const State& node_y(std::size_t i) const { return ys_[i]; }

    State eval(double x) const {
        State y, dy;
        eval_hermite(x, y, &dy, false);
        return y;
    }

    /// Value and slope of the interpolant itself (not the ODE right-hand
    /// side), so residual checks against the differential equation are a
    /// real consistency test.
    std::pair<State, State> eval_with_derivative(double x) const {
        State y, dy;
        eval_hermite(x, y, &dy, true);
        return {y, dy};
    }

private:
    void eval_hermite(double x, State& y, State* dy, bool want_dy) const {
        const std::size_t n = xs_.size();
        if (n == 1) {
            y = ys_[0];
            if (want_dy) *dy = fs_[0];
            return;
        }
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
        hi = std::clamp<std::size_t>(hi, 1, n - 1);
        const std::size_t lo = hi - 1;

        const double h = xs_[hi] - xs_[lo];
        const double t = (x - xs_[lo]) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = h00 * ys_[lo][i] + h * h10 * fs_[lo][i] + h01 * ys_[hi][i] +
                   h * h11 * fs_[hi][i];
        }
        if (want_dy) {
            const double d00 = (6 * t2 - 6 * t) / h;
            const double d10 = 3 * t2 - 4 * t + 1;
            const double d01 = (-6 * t2 + 6 * t) / h;
            const double d11 = 3 * t2 - 2 * t;
            for (std::size_t i = 0; i < N; ++i) {
                (*dy)[i] = d00 * ys_[lo][i] + d10 * fs_[lo][i] +
                           d01 * ys_[hi][i] + d11 * fs_[hi][i];
            }
        }
    }

    std::vector<double> xs_;
    std::vector<State> ys_;
    std::vector<State> fs_;
};

/// Adaptive Dormand-Prince 5(4) from x0 to x1 (x1 >= x0).
/// `f(x, y, dydx)` evaluates the right-hand side. Accepted steps with
/// x >= record_from are stored for dense output.
template <std::size_t N, typename F>
OdeSolution<N> integrate_dopri5(F&& f, double x0, double x1,
                                const std::array<double, N>& y0,
                                const OdeOptions& opt = {}) {
    using State = std::array<double, N>;

    // Butcher tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                     a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // y5 - y4 error weights (b minus the embedded 4th-order weights)
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeSolution<N> sol;
    State y = y0;
    State k1;
    f(x0, y, k1);
    if (x0 >= opt.record_from) sol.append(x0, y, k1);
    if (x1 <= x0) {
        if (sol.empty()) sol.append(x0, y, k1);
        return sol;
    }

    double x = x0;
    double h = std::min({0.01 * (x1 - x0) + 1e-12, opt.max_step, x1 - x0});
    long steps = 0;

    State k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
    while (x < x1) {
        if (++steps > opt.max_steps) {
            throw NumericError("dopri5: step budget exhausted");
        }
        // keep capped resolution once within (or about to enter) the recorded range
        if (x + h >= opt.record_from) h = std::min(h, opt.max_step);
        h = std::min(h, x1 - x);

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(x + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        f(x + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        f(x + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        f(x + h, ynew, k7);  // FSAL
        for (std::size_t i = 0; i < N; ++i)
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * k7[i]);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale =
                opt.abs_tol +
                opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = yerr[i] / scale;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0) {
            const double x_prev = x;
            x += h;
            if (x >= opt.record_from) {
                if (sol.empty()) {
                    // store the step start too, so the interval containing
                    // record_from has a full Hermite bracket
                    sol.append(x_prev, y, k1);
                }
                sol.append(x, ynew, k7);
            }
            y = ynew;
            k1 = k7;
        }

        const double safety = 0.9;
        double factor =
            (err > 0) ? safety * std::pow(err, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        h *= factor;
        const double min_h = 4.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(x), 1.0);
        if (h < min_h) {
            throw NumericError("dopri5: step size underflow at x=" +
                               std::to_string(x));
        }
    }

    if (sol.empty()) {
        // whole integration was left of record_from; keep the endpoint
        sol.append(x, y, k1);
    }
    return sol;
}

}  // namespace elastic_reflect::detail
