#include "geolab/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geolab/metrics.hpp"

namespace geolab::morse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNullityTol = 1e-9;

} // namespace

ConjugateReport jacobi_zeros(const Trajectory& traj, double tol) {
    const double t0 = traj.t_begin();
    const double t1 = traj.t_end();
    if (!(t1 > t0)) throw DomainError("jacobi_zeros: empty trajectory");

    const metrics::SurfaceMetric metric{traj.profile};
    auto curvature_at = [&](double t) {
        const geodesics::GeodesicState s = traj.state_at(t);
        return metrics::gaussian_curvature(metric, s.r, s.phi);
    };

    ConjugateReport rep;
    rep.geodesic = &traj;
    rep.t_end = t1;

    // Force step endpoints onto event times; turning points of small-c
    // geodesics carry narrow curvature spikes the controller must not skip.
    std::vector<double> checkpoints;
    checkpoints.reserve(traj.events.size());
    for (const auto& ev : traj.events) {
        if (ev.t > t0 && ev.t < t1) checkpoints.push_back(ev.t);
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    ode::Options oopt;
    oopt.rtol = tol;
    oopt.atol = tol;
    oopt.h_max = 0.25;
    oopt.checkpoints = &checkpoints;

    auto rhs = [&](double t, const ode::Vec<2>& y) -> ode::Vec<2> {
        return {y[1], -curvature_at(t) * y[0]};
    };

    auto on_step = [&](const ode::DenseStep<2>& step, const ode::Vec<2>& y_end,
                       const ode::Vec<2>&) -> ode::StepControl {
        constexpr int kProbes = 8;
        double tp = step.t0;
        double gp = step.eval(tp)[0];
        for (int k = 1; k <= kProbes; ++k) {
            const double tk = step.t0 + step.h * k / kProbes;
            const double gk = (k == kProbes) ? y_end[0] : step.eval(tk)[0];
            if (gp * gk < 0.0) {
                const double z = ode::bisect_dense(
                    step, [](const ode::Vec<2>& yy) { return yy[0]; }, tp, tk, gp, 1e-12);
                rep.jacobi_zeros.push_back(z);
            } else if (gk == 0.0 && k < kProbes && tk > t0 + 1e-12) {
                rep.jacobi_zeros.push_back(tk);
            }
            tp = tk;
            gp = gk;
        }
        return ode::StepControl::Continue;
    };

    try {
        ode::integrate<2>(rhs, {0.0, 1.0}, t0, t1, oopt, on_step);
    } catch (const DegeneracyError&) {
        throw DegeneracyError("jacobi_zeros: curvature evaluation entered the guard band");
    }

    // Endpoint zeros flag nullity and are excluded from the count.
    while (!rep.jacobi_zeros.empty() &&
           std::abs(rep.jacobi_zeros.back() - t1) <= kNullityTol) {
        rep.jacobi_zeros.pop_back();
        rep.nullity_flag = true;
    }
    rep.index = static_cast<int>(rep.jacobi_zeros.size());

    for (const auto& ev : traj.events) {
        if (ev.kind == geodesics::EventKind::EquatorCrossing && ev.t > t0 && ev.t < t1) {
            ++rep.equator_crossings;
        }
    }
    return rep;
}

IndexVsCrossings index_vs_crossings(const Trajectory& traj, double tol) {
    if (!traj.profile.is_product()) {
        throw DomainError("index_vs_crossings: requires a product-profile trajectory");
    }
    const ConjugateReport rep = jacobi_zeros(traj, tol);
    IndexVsCrossings out;
    out.index = rep.index;
    out.crossings = rep.equator_crossings;
    out.half_bound_ok = 2 * out.index >= out.crossings;
    out.full_bound_ok = out.index >= out.crossings;
    return out;
}

GapCheck conjugate_gap_check(const ConjugateReport& report, double tol) {
    GapCheck out;
    const double t0 = report.geodesic ? report.geodesic->t_begin() : 0.0;

    if (report.jacobi_zeros.empty()) {
        // No zeros: the whole span is one gap. Flags a missed conjugate point
        // whenever the span exceeds pi.
        out.max_gap = report.t_end - t0;
    } else {
        out.max_gap = report.jacobi_zeros.front() - t0;
        for (std::size_t i = 1; i < report.jacobi_zeros.size(); ++i) {
            out.max_gap = std::max(out.max_gap, report.jacobi_zeros[i] - report.jacobi_zeros[i - 1]);
        }
    }
    out.rauch_ok = out.max_gap <= kPi + tol;

    // Full periods between consecutive lower turning points. A trajectory
    // launched exactly at a lower turning point contributes its start as the
    // zeroth one (the start state is never an event).
    out.min_full_period_length = std::numeric_limits<double>::infinity();
    if (report.geodesic) {
        double prev_lower = std::numeric_limits<double>::quiet_NaN();
        const auto& first = report.geodesic->samples.front();
        if (std::abs(first.phidot) <= 1e-12 && first.phi < kPi / 2.0) {
            prev_lower = first.t;
        }
        for (const auto& ev : report.geodesic->events) {
            if (ev.kind != geodesics::EventKind::TurningPoint || ev.direction != 1) continue;
            if (!std::isnan(prev_lower)) {
                const double len = ev.t - prev_lower;
                out.min_full_period_length = std::min(out.min_full_period_length, len);
                if (!(len > 4.0)) out.period_length_ok = false;
                ++out.full_periods_seen;
            }
            prev_lower = ev.t;
        }
    }
    if (out.full_periods_seen == 0) out.min_full_period_length = 0.0;
    return out;
}

std::vector<double> jacobi_values(const Trajectory& traj, const std::vector<double>& times,
                                  double tol) {
    const double t0 = traj.t_begin();
    const double t1 = traj.t_end();
    const metrics::SurfaceMetric metric{traj.profile};
    auto rhs = [&](double t, const ode::Vec<2>& y) -> ode::Vec<2> {
        const geodesics::GeodesicState s = traj.state_at(t);
        return {y[1], -metrics::gaussian_curvature(metric, s.r, s.phi) * y[0]};
    };

    std::vector<double> checkpoints;
    for (const auto& ev : traj.events) {
        if (ev.t > t0 && ev.t < t1) checkpoints.push_back(ev.t);
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    ode::Options oopt;
    oopt.rtol = tol;
    oopt.atol = tol;
    oopt.h_max = 0.25;
    oopt.checkpoints = &checkpoints;

    std::vector<double> out(times.size(), 0.0);
    std::size_t next = 0;
    while (next < times.size() && times[next] <= t0) {
        out[next++] = 0.0;
    }
    auto on_step = [&](const ode::DenseStep<2>& step, const ode::Vec<2>&,
                       const ode::Vec<2>&) -> ode::StepControl {
        while (next < times.size() && times[next] <= step.t_hi + 1e-14) {
            out[next] = step.eval(std::clamp(times[next], step.t0, step.t_hi))[0];
            ++next;
        }
        return next >= times.size() ? ode::StepControl::Stop : ode::StepControl::Continue;
    };
    ode::integrate<2>(rhs, {0.0, 1.0}, t0, t1, oopt, on_step);
    return out;
}

std::vector<IndexGrowthRow> index_growth_table(const std::vector<double>& c_list, double r_window,
                                               double tol) {
    if (!(r_window > 0.0)) throw DomainError("index_growth_table: r_window must be positive");
    std::vector<IndexGrowthRow> rows;
    rows.reserve(c_list.size());

    const auto product = metrics::LambdaProfile::product();
    for (double c : c_list) {
        const double period = 4.0 * geodesics::quarter_period(c);
        // Generous t budget: each full period is longer than 4 in ds but
        // bounded by 2 pi, and the window holds about r_window/period of them.
        const double t_budget = (r_window / period + 2.0) * 2.0 * kPi;

        geodesics::IntegrateOptions opt;
        opt.rtol = opt.atol = tol;
        opt.stop_at_r = 0.0;
        const auto start = geodesics::turning_point_state(c, -r_window);
        const Trajectory traj = geodesics::integrate_t(product, start, t_budget, opt);
        if (traj.termination != geodesics::Termination::TerminalEvent) {
            throw StepFailureError("index_growth_table: window traversal incomplete");
        }

        const ConjugateReport rep = jacobi_zeros(traj, tol);
        rows.push_back(IndexGrowthRow{c, period, rep.equator_crossings, rep.index});
    }
    return rows;
}

} // namespace geolab::morse
