#ifndef GEOLAB_ODE_HPP
#define GEOLAB_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "geolab/errors.hpp"

// Embedded Dormand-Prince 5(4) pair with the classic quartic dense-output
// interpolant. The controller retries a step at a smaller size whenever the
// right-hand side throws, so event-terminated integrations may probe slightly
// past a domain boundary without aborting.

namespace geolab::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// One accepted step together with its continuous extension.
/// eval() is the standard DOPRI5 dense output, 4th order accurate on
/// [t0, t0 + h]; t_hi marks the valid end (shorter than h for a step
/// truncated by a terminal event).
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    double t_hi = 0.0;
    Vec<N> rc1{}, rc2{}, rc3{}, rc4{}, rc5{};

    Vec<N> eval(double t) const {
        const double theta = (t - t0) / h;
        const double th1 = 1.0 - theta;
        Vec<N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = rc1[i] + theta * (rc2[i] + th1 * (rc3[i] + theta * (rc4[i] + th1 * rc5[i])));
        }
        return y;
    }

    bool contains(double t) const {
        const double lo = std::min(t0, t_hi);
        const double hi = std::max(t0, t_hi);
        return t >= lo - 1e-14 && t <= hi + 1e-14;
    }
};

struct Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_max = std::numeric_limits<double>::infinity();
    double h_init = 0.0; // 0 = automatic
    std::size_t max_steps = 20'000'000;
    // Optional sorted times the integrator must land on exactly (the
    // right-hand side may have localized features there).
    const std::vector<double>* checkpoints = nullptr;
};

/// Post-step state projection (e.g. back onto an invariant manifold).
/// Returning true signals the state changed and the FSAL derivative must be
/// refreshed.
template <std::size_t N>
using Projector = std::function<bool(double t, Vec<N>& y)>;

struct Stats {
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    std::size_t n_rhs = 0;
};

enum class StepControl { Continue, Stop };

namespace detail {

// DOPRI5 tableau (Dormand & Prince 1980).
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// y5 - y4 error weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output weights.
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
double rms_norm(const Vec<N>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(N));
}

} // namespace detail

/// Integrate y' = rhs(t, y) from t0 to t1 (either direction).
/// on_step(step, y_end, f_end) is called after every accepted step and may
/// return StepControl::Stop to end the integration early. An optional
/// projector runs before the callback; the dense output of the step is left
/// untouched (the projection is of the order of the local error).
template <std::size_t N, class RHS, class OnStep>
Stats integrate(RHS&& rhs, Vec<N> y, double t0, double t1, const Options& opt, OnStep&& on_step,
                const Projector<N>& project = {}) {
    using namespace detail;

    Stats stats;
    if (t1 == t0) return stats;
    const double dir = (t1 > t0) ? 1.0 : -1.0;

    auto try_rhs = [&](double t, const Vec<N>& yy, Vec<N>& out) -> bool {
        try {
            out = rhs(t, yy);
            ++stats.n_rhs;
            for (double v : out) {
                if (!std::isfinite(v)) return false;
            }
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    Vec<N> k1{};
    if (!try_rhs(t0, y, k1)) {
        throw StepFailureError("ode: right-hand side not evaluable at the initial state");
    }

    // Initial step size: Hairer-style heuristic from |y| and |f|.
    double h = opt.h_init;
    if (h == 0.0) {
        double d0 = 0.0, dd1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            dd1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        dd1 = std::sqrt(dd1 / N);
        h = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
        h = std::min(h, std::abs(t1 - t0));
    }
    h = std::min(h, opt.h_max) * dir;

    std::size_t cp_idx = 0;
    if (opt.checkpoints) {
        // Skip checkpoints at or before the start.
        while (cp_idx < opt.checkpoints->size() &&
               ((*opt.checkpoints)[cp_idx] - t0) * dir <= 1e-14) {
            ++cp_idx;
        }
    }

    double t = t0;
    Vec<N> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, ynew{};

    while ((t1 - t) * dir > 0.0) {
        if (stats.n_accepted + stats.n_rejected > opt.max_steps) {
            throw StepFailureError("ode: step limit exceeded");
        }
        if ((t + h - t1) * dir > 0.0) h = t1 - t;
        if (opt.checkpoints && cp_idx < opt.checkpoints->size()) {
            const double tc = (*opt.checkpoints)[cp_idx];
            if ((t + h - tc) * dir > 0.0) h = tc - t;
        }
        const double h_floor = 1e-14 * std::max(1.0, std::abs(t));
        if (std::abs(h) < h_floor) {
            // A residual sliver at the very end counts as arrival.
            if (std::abs(t1 - t) < 10.0 * h_floor) break;
            throw StepFailureError("ode: step size underflow");
        }

        bool stage_ok = true;
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        stage_ok = try_rhs(t + c2 * h, ytmp, k2);
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            stage_ok = try_rhs(t + c3 * h, ytmp, k3);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            stage_ok = try_rhs(t + c4 * h, ytmp, k4);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            stage_ok = try_rhs(t + c5 * h, ytmp, k5);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            stage_ok = try_rhs(t + h, ytmp, k6);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            stage_ok = try_rhs(t + h, ynew, k7);
        }

        if (!stage_ok) {
            // Stage left the evaluable region; retry smaller.
            ++stats.n_rejected;
            h *= 0.25;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);

        if (err > 1.0) {
            ++stats.n_rejected;
            const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= fac;
            continue;
        }

        // Accepted: build the dense step.
        DenseStep<N> step;
        step.t0 = t;
        step.h = h;
        step.t_hi = t + h;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            step.rc1[i] = y[i];
            step.rc2[i] = ydiff;
            step.rc3[i] = bspl;
            step.rc4[i] = ydiff - h * k7[i] - bspl;
            step.rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }

        t += h;
        y = ynew;
        k1 = k7; // FSAL
        ++stats.n_accepted;

        if (project && project(t, y)) {
            if (!try_rhs(t, y, k1)) {
                throw StepFailureError("ode: right-hand side not evaluable after projection");
            }
        }

        if (opt.checkpoints && cp_idx < opt.checkpoints->size() &&
            std::abs(t - (*opt.checkpoints)[cp_idx]) <= 1e-14 * std::max(1.0, std::abs(t))) {
            ++cp_idx;
        }

        if (on_step(step, y, k1) == StepControl::Stop) {
            return stats;
        }

        const double fac = std::min(10.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
        h = dir * std::min(std::abs(h) * fac, opt.h_max);
    }
    return stats;
}

/// Bisect g(dense(t)) = 0 inside [ta, tb] (g(ta), g(tb) of opposite sign)
/// down to |tb - ta| <= tol; returns the root abscissa.
template <std::size_t N, class G>
double bisect_dense(const DenseStep<N>& step, G&& g, double ta, double tb, double ga, double tol) {
    for (int it = 0; it < 200 && std::abs(tb - ta) > tol; ++it) {
        const double tm = 0.5 * (ta + tb);
        const double gm = g(step.eval(tm));
        if ((ga <= 0.0 && gm <= 0.0) || (ga > 0.0 && gm > 0.0)) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    return 0.5 * (ta + tb);
}

} // namespace geolab::ode

#endif
