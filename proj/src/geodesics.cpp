#include "geolab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace geolab::geodesics {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 1.57079632679489661923;
// Hard evaluation floor for phi inside the integrator; trial stages may probe
// slightly past the guard band before the contact event truncates the step.
constexpr double kPhiFloor = 1e-9;
// Minimum |d g/dt| for a located crossing to count as transversal.
constexpr double kTransversalTol = 1e-8;

double cot_guarded(double phi) {
    const double s = std::sin(phi);
    if (phi < kPhiFloor || phi > kPi - kPhiFloor || s <= 0.0) {
        throw DegeneracyError("geodesic rhs evaluated on the degenerate boundary");
    }
    return std::cos(phi) / s;
}

struct Rhs4 {
    const LambdaProfile* p;
    ode::Vec<4> operator()(double /*t*/, const ode::Vec<4>& y) const {
        const double cot = cot_guarded(y[1]);
        const metrics::ProfileEval e = p->eval(y[0]);
        if (!(e.lambda > 0.0)) throw PoleError("geodesic rhs: lambda(r) = 0");
        const double rd = y[2], pd = y[3];
        const double rddot =
            -2.0 * cot * rd * pd - 0.5 * (e.dlambda / e.lambda) * rd * rd + e.dlambda * pd * pd;
        const double phiddot =
            cot * (rd * rd / e.lambda - pd * pd) - 2.0 * (e.dlambda / e.lambda) * rd * pd;
        return {rd, pd, rddot, phiddot};
    }
};

struct Rhs3 {
    const LambdaProfile* p;
    double dir; // sign of dphi along the motion
    ode::Vec<3> operator()(double phi, const ode::Vec<3>& y) const {
        const double cot = cot_guarded(phi);
        const metrics::ProfileEval e = p->eval(y[0]);
        if (!(e.lambda > 0.0)) throw PoleError("geodesic rhs: lambda(r) = 0");
        const double u = y[1];
        const double d2r = -cot * u * u * u / e.lambda + 1.5 * (e.dlambda / e.lambda) * u * u -
                           cot * u + e.dlambda;
        const double dsdphi = std::sin(phi) * std::sqrt(e.lambda * (u * u + e.lambda));
        return {u, d2r, dir * dsdphi};
    }
};

enum class WatchType { PhiLevel, PhidotZero, RLevel };

struct Watch {
    WatchType type;
    double level;
    EventKind kind;
    bool terminal;
    bool record;
};

double watch_value(const Watch& w, const ode::Vec<4>& y) {
    switch (w.type) {
        case WatchType::PhiLevel: return y[1] - w.level;
        case WatchType::PhidotZero: return y[3];
        case WatchType::RLevel: return y[0] - w.level;
    }
    return 0.0;
}

GeodesicState to_state(const ode::Vec<4>& y, double t) {
    return GeodesicState{y[0], y[1], y[2], y[3], t};
}

} // namespace

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::EquatorCrossing: return "equator_crossing";
        case EventKind::TurningPoint: return "turning_point";
        case EventKind::MidlineZero: return "midline_r0";
        case EventKind::MidlineMinusEps: return "midline_minus_eps";
        case EventKind::BoundaryContact: return "boundary_contact";
    }
    return "unknown";
}

double GeodesicState::speed_sq(const LambdaProfile& p) const {
    const double lam = p.lambda(r);
    const double s2 = std::sin(phi) * std::sin(phi);
    return (rdot * rdot + lam * phidot * phidot) * lam * s2;
}

double GeodesicState::clairaut() const { return rdot * std::sin(phi) * std::sin(phi); }

std::pair<double, double> geodesic_rhs(const LambdaProfile& p, const GeodesicState& s) {
    if (s.phi < metrics::kPhiGuard || s.phi > kPi - metrics::kPhiGuard) {
        throw DegeneracyError("geodesic_rhs outside the phi guard band");
    }
    const auto f = Rhs4{&p}(s.t, {s.r, s.phi, s.rdot, s.phidot});
    return {f[2], f[3]};
}

double geodesic_rhs_phi(const LambdaProfile& p, double r, double drdphi, double phi) {
    if (phi < metrics::kPhiGuard || phi > kPi - metrics::kPhiGuard) {
        throw DegeneracyError("geodesic_rhs_phi outside the phi guard band");
    }
    const auto f = Rhs3{&p, 1.0}(phi, {r, drdphi, 0.0});
    return f[1];
}

GeodesicState state_from_phi(const LambdaProfile& p, double r, double phi, double drdphi,
                             int phidot_sign, double t) {
    const double lam = p.lambda(r);
    if (!(lam > 0.0)) throw PoleError("state_from_phi: lambda(r) = 0");
    const double s = std::sin(phi);
    if (!(s > 0.0)) throw DegeneracyError("state_from_phi on the boundary");
    const double phidot =
        (phidot_sign >= 0 ? 1.0 : -1.0) / (s * std::sqrt(lam * (drdphi * drdphi + lam)));
    return GeodesicState{r, phi, drdphi * phidot, phidot, t};
}

GeodesicState turning_point_state(double c, double r) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("turning_point_state: c must lie in (0,1)");
    return GeodesicState{r, std::asin(c), 1.0 / c, 0.0, 0.0};
}

// ---------------------------------------------------------------------------
// Arc-length integration with event location.

Trajectory integrate_t(const LambdaProfile& p, const GeodesicState& s0, double t_end,
                       const IntegrateOptions& opt) {
    if (s0.phi <= opt.phi_guard || s0.phi >= kPi - opt.phi_guard) {
        throw DomainError("integrate_t: start inside the phi guard band");
    }
    if (!(p.lambda(s0.r) > 0.0)) throw PoleError("integrate_t: lambda(r0) = 0");
    if (std::abs(s0.speed_sq(p) - 1.0) > 1e-6) {
        throw DomainError("integrate_t: start state is not unit speed");
    }
    if (!(t_end > s0.t)) throw DomainError("integrate_t: t_end must exceed start time");

    std::vector<Watch> watches = {
        {WatchType::PhiLevel, kHalfPi, EventKind::EquatorCrossing, false, true},
        {WatchType::PhidotZero, 0.0, EventKind::TurningPoint, false, true},
        {WatchType::RLevel, 0.0, EventKind::MidlineZero, false, true},
        {WatchType::PhiLevel, opt.phi_guard, EventKind::BoundaryContact, true, true},
        {WatchType::PhiLevel, kPi - opt.phi_guard, EventKind::BoundaryContact, true, true},
    };
    if (p.kind() == metrics::ProfileKind::Reflected) {
        watches.push_back({WatchType::RLevel, -p.epsilon(), EventKind::MidlineMinusEps, false, true});
    }
    if (opt.stop_at_r) {
        bool matched = false;
        for (auto& w : watches) {
            if (w.type == WatchType::RLevel && std::abs(w.level - *opt.stop_at_r) < 1e-15) {
                w.terminal = true;
                matched = true;
            }
        }
        if (!matched) {
            const EventKind k =
                std::abs(*opt.stop_at_r) < 1e-15 ? EventKind::MidlineZero : EventKind::MidlineMinusEps;
            watches.push_back({WatchType::RLevel, *opt.stop_at_r, k, true, true});
        }
    }
    if (opt.stop_at_phi) {
        const bool is_equator = std::abs(*opt.stop_at_phi - kHalfPi) < 1e-15;
        watches.push_back(
            {WatchType::PhiLevel, *opt.stop_at_phi, EventKind::EquatorCrossing, true, is_equator});
    }

    Trajectory traj;
    traj.profile = p;
    traj.samples.push_back(s0);
    if (p.is_product()) traj.clairaut_c = s0.clairaut();

    Rhs4 rhs{&p};

    auto transversal_speed = [&](const Watch& w, const ode::Vec<4>& y) -> double {
        switch (w.type) {
            case WatchType::PhiLevel: return std::abs(y[3]);
            case WatchType::RLevel: return std::abs(y[2]);
            case WatchType::PhidotZero: {
                try {
                    return std::abs(rhs(0.0, y)[3]);
                } catch (const Error&) {
                    return 0.0;
                }
            }
        }
        return 0.0;
    };

    auto push_event = [&](Event ev) {
        for (auto it = traj.events.rbegin(); it != traj.events.rend(); ++it) {
            if (it->t < ev.t - 1e-10) break;
            if (it->kind == ev.kind && std::abs(it->t - ev.t) <= 1e-10) return;
        }
        traj.events.push_back(std::move(ev));
    };

    ode::Options oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    oopt.h_max = opt.h_max;
    oopt.max_steps = opt.max_steps;

    struct Candidate {
        double t;
        std::size_t watch;
    };

    auto on_step = [&](const ode::DenseStep<4>& step, const ode::Vec<4>& y_end,
                       const ode::Vec<4>& /*f_end*/) -> ode::StepControl {
        // Locate crossings of every watched functional inside this step.
        constexpr int kProbes = 8;
        std::vector<Candidate> found;
        for (std::size_t wi = 0; wi < watches.size(); ++wi) {
            const Watch& w = watches[wi];
            double tp = step.t0;
            double gp = watch_value(w, step.eval(tp));
            for (int k = 1; k <= kProbes; ++k) {
                const double tk = step.t0 + step.h * k / kProbes;
                const double gk = watch_value(w, k == kProbes ? y_end : step.eval(tk));
                if (gp * gk < 0.0) {
                    const double tstar = ode::bisect_dense(
                        step, [&](const ode::Vec<4>& yy) { return watch_value(w, yy); }, tp, tk, gp,
                        opt.event_tol);
                    found.push_back({tstar, wi});
                } else if (gk == 0.0 && k < kProbes) {
                    found.push_back({tk, wi});
                }
                tp = tk;
                gp = gk;
            }
        }
        std::sort(found.begin(), found.end(),
                  [](const Candidate& a, const Candidate& b) { return a.t < b.t; });

        for (const Candidate& cand : found) {
            const Watch& w = watches[cand.watch];
            const ode::Vec<4> y = step.eval(cand.t);
            if (transversal_speed(w, y) <= kTransversalTol) continue;

            Event ev;
            ev.kind = w.kind;
            ev.t = cand.t;
            ev.state = to_state(y, cand.t);
            switch (w.type) {
                case WatchType::PhiLevel: ev.direction = y[3] > 0.0 ? 1 : -1; break;
                case WatchType::PhidotZero: ev.direction = y[1] < kHalfPi ? 1 : -1; break;
                case WatchType::RLevel: ev.direction = y[2] > 0.0 ? 1 : -1; break;
            }

            if (w.kind == EventKind::BoundaryContact && !opt.allow_boundary_contact) {
                throw BoundaryApproachError("integrate_t: trajectory entered the phi guard band");
            }
            if (w.record) push_event(ev);
            if (w.terminal) {
                // Truncate the trajectory at the event.
                ode::DenseStep<4> cut = step;
                cut.t_hi = cand.t;
                traj.t_dense.push_back(cut);
                traj.samples.push_back(ev.state);
                traj.termination = (w.kind == EventKind::BoundaryContact)
                                       ? Termination::BoundaryContact
                                       : Termination::TerminalEvent;
                return ode::StepControl::Stop;
            }
        }

        traj.t_dense.push_back(step);
        traj.samples.push_back(to_state(y_end, step.t0 + step.h));
        return ode::StepControl::Continue;
    };

    ode::integrate<4>(rhs, {s0.r, s0.phi, s0.rdot, s0.phidot}, s0.t, t_end, oopt, on_step);
    return traj;
}

// ---------------------------------------------------------------------------
// Phi-parametrized integration.

Trajectory integrate_phi(const LambdaProfile& p, const PhiState& s0,
                         std::pair<double, double> phi_span, const IntegratePhiOptions& opt) {
    const double phi_a = phi_span.first, phi_b = phi_span.second;
    if (phi_a == phi_b) throw DomainError("integrate_phi: empty span");
    if (std::min(phi_a, phi_b) < kPhiFloor || std::max(phi_a, phi_b) > kPi - kPhiFloor) {
        throw DomainError("integrate_phi: span touches the degenerate boundary");
    }
    if (std::abs(s0.drdphi) > opt.slope_limit) {
        throw SlopeBlowupError("integrate_phi: initial slope beyond the switch threshold");
    }
    const double dir = phi_b > phi_a ? 1.0 : -1.0;

    Trajectory traj;
    traj.profile = p;
    traj.phi_dir = static_cast<int>(dir);
    traj.samples.push_back(state_from_phi(p, s0.r, phi_a, s0.drdphi, traj.phi_dir, opt.t0));
    if (p.is_product()) traj.clairaut_c = traj.samples.front().clairaut();

    Rhs3 rhs{&p, dir};

    ode::Options oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    oopt.max_steps = opt.max_steps;

    const bool want_stop_r = opt.stop_at_r.has_value();
    const double r_stop = want_stop_r ? *opt.stop_at_r : 0.0;

    auto record_equator = [&](const ode::DenseStep<3>& step) {
        if ((step.t0 - kHalfPi) * (step.t_hi - kHalfPi) < 0.0) {
            const ode::Vec<3> y = step.eval(kHalfPi);
            Event ev;
            ev.kind = EventKind::EquatorCrossing;
            ev.t = y[2];
            ev.state = state_from_phi(p, y[0], kHalfPi, y[1], traj.phi_dir, y[2]);
            ev.direction = traj.phi_dir;
            traj.events.push_back(ev);
        }
    };

    auto on_step = [&](const ode::DenseStep<3>& step, const ode::Vec<3>& y_end,
                       const ode::Vec<3>& /*f_end*/) -> ode::StepControl {
        if (std::abs(y_end[1]) > opt.slope_limit) {
            throw SlopeBlowupError("integrate_phi: |dr/dphi| exceeded the switch threshold");
        }
        if (want_stop_r) {
            const double g0 = step.eval(step.t0)[0] - r_stop;
            const double g1 = y_end[0] - r_stop;
            if (g0 * g1 < 0.0) {
                const double phi_star = ode::bisect_dense(
                    step, [&](const ode::Vec<3>& yy) { return yy[0] - r_stop; }, step.t0,
                    step.t0 + step.h, g0, opt.event_tol);
                ode::DenseStep<3> cut = step;
                cut.t_hi = phi_star;
                record_equator(cut);
                const ode::Vec<3> y = step.eval(phi_star);
                Event ev;
                ev.kind = std::abs(r_stop) < 1e-15 ? EventKind::MidlineZero
                                                   : EventKind::MidlineMinusEps;
                ev.t = y[2];
                ev.state = state_from_phi(p, y[0], phi_star, y[1], traj.phi_dir, y[2]);
                ev.direction = ev.state.rdot > 0.0 ? 1 : -1;
                traj.events.push_back(ev);
                traj.phi_dense.push_back(cut);
                traj.samples.push_back(ev.state);
                traj.termination = Termination::TerminalEvent;
                return ode::StepControl::Stop;
            }
        }
        record_equator(step);
        traj.phi_dense.push_back(step);
        traj.samples.push_back(
            state_from_phi(p, y_end[0], step.t0 + step.h, y_end[1], traj.phi_dir, y_end[2]));
        return ode::StepControl::Continue;
    };

    ode::integrate<3>(rhs, {s0.r, s0.drdphi, opt.t0}, phi_a, phi_b, oopt, on_step);
    return traj;
}

// ---------------------------------------------------------------------------
// Trajectory queries.

GeodesicState Trajectory::state_at(double t) const {
    if (!t_dense.empty()) {
        // Steps are contiguous and ordered by t0.
        auto it = std::upper_bound(t_dense.begin(), t_dense.end(), t,
                                   [](double tv, const ode::DenseStep<4>& s) { return tv < s.t0; });
        if (it != t_dense.begin()) --it;
        const double tc = std::clamp(t, it->t0, it->t_hi);
        return to_state(it->eval(tc), tc);
    }
    if (!phi_dense.empty()) {
        // t is the third component, monotone along the motion; find the step
        // whose t-range brackets the query and invert by bisection in phi.
        for (const auto& step : phi_dense) {
            const double ta = step.eval(step.t0)[2];
            const double tb = step.eval(step.t_hi)[2];
            if (t < std::min(ta, tb) - 1e-12 || t > std::max(ta, tb) + 1e-12) continue;
            double pa = step.t0, pb = step.t_hi;
            for (int it2 = 0; it2 < 200 && std::abs(pb - pa) > 1e-14; ++it2) {
                const double pm = 0.5 * (pa + pb);
                const double tm = step.eval(pm)[2];
                if ((tm - t) * (ta - t) > 0.0) {
                    pa = pm;
                } else {
                    pb = pm;
                }
            }
            const double phi = 0.5 * (pa + pb);
            const ode::Vec<3> y = step.eval(phi);
            return state_from_phi(profile, y[0], phi, y[1], phi_dir, y[2]);
        }
        // Clamp to the ends.
        return t <= samples.front().t ? samples.front() : samples.back();
    }
    throw DomainError("state_at: trajectory has no dense data");
}

namespace {

// Binary search over the phi-ordered dense steps (direction-agnostic).
const ode::DenseStep<3>& phi_step_containing(const std::vector<ode::DenseStep<3>>& steps, int dir,
                                             double phi) {
    const double key = dir * phi;
    std::size_t lo = 0, hi = steps.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (dir * steps[mid].t0 <= key) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const auto& step = steps[lo];
    const double a = std::min(step.t0, step.t_hi), b = std::max(step.t0, step.t_hi);
    if (phi < a - 1e-12 || phi > b + 1e-12) {
        throw DomainError("phi query outside the integrated span");
    }
    return step;
}

} // namespace

double Trajectory::r_at_phi(double phi) const {
    if (phi_dense.empty()) throw DomainError("r_at_phi: trajectory is not phi-parametrized");
    const auto& step = phi_step_containing(phi_dense, phi_dir, phi);
    const double a = std::min(step.t0, step.t_hi), b = std::max(step.t0, step.t_hi);
    return step.eval(std::clamp(phi, a, b))[0];
}

double Trajectory::drdphi_at_phi(double phi) const {
    if (phi_dense.empty()) throw DomainError("drdphi_at_phi: trajectory is not phi-parametrized");
    const auto& step = phi_step_containing(phi_dense, phi_dir, phi);
    const double a = std::min(step.t0, step.t_hi), b = std::max(step.t0, step.t_hi);
    return step.eval(std::clamp(phi, a, b))[1];
}

std::vector<GeodesicState> Trajectory::level_crossings(double level, int phidot_sign) const {
    std::vector<GeodesicState> out;
    if (!t_dense.empty()) {
        constexpr int kProbes = 8;
        for (const auto& step : t_dense) {
            const double span = step.t_hi - step.t0;
            if (span <= 0.0) continue;
            double tp = step.t0;
            double gp = step.eval(tp)[1] - level;
            for (int k = 1; k <= kProbes; ++k) {
                const double tk = step.t0 + span * k / kProbes;
                const double gk = step.eval(tk)[1] - level;
                if (gp * gk < 0.0) {
                    const double tstar = ode::bisect_dense(
                        step, [&](const ode::Vec<4>& yy) { return yy[1] - level; }, tp, tk, gp,
                        1e-12);
                    const ode::Vec<4> y = step.eval(tstar);
                    if (std::abs(y[3]) > kTransversalTol &&
                        (phidot_sign == 0 || y[3] * phidot_sign > 0.0)) {
                        out.push_back(to_state(y, tstar));
                    }
                }
                tp = tk;
                gp = gk;
            }
        }
        return out;
    }
    if (!phi_dense.empty()) {
        for (const auto& step : phi_dense) {
            const double lo = std::min(step.t0, step.t_hi), hi = std::max(step.t0, step.t_hi);
            if (level <= lo || level >= hi) continue;
            const ode::Vec<3> y = step.eval(level);
            const GeodesicState s = state_from_phi(profile, y[0], level, y[1], phi_dir, y[2]);
            if (phidot_sign == 0 || s.phidot * phidot_sign > 0.0) out.push_back(s);
        }
        return out;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Period quadratures and closed-form leaves.

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    struct Rec {
        const std::function<double(double)>& f;
        double operator()(double x0, double x2, double f0, double f1, double f2, double whole,
                          double tol2, int depth) const {
            const double x1 = 0.5 * (x0 + x2);
            const double lm = 0.5 * (x0 + x1), rm = 0.5 * (x1 + x2);
            const double flm = f(lm), frm = f(rm);
            const double h = x2 - x0;
            const double left = h / 12.0 * (f0 + 4.0 * flm + f1);
            const double right = h / 12.0 * (f1 + 4.0 * frm + f2);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol2) {
                return left + right + delta / 15.0;
            }
            return (*this)(x0, x1, f0, flm, f1, left, 0.5 * tol2, depth - 1) +
                   (*this)(x1, x2, f1, frm, f2, right, 0.5 * tol2, depth - 1);
        }
    };
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec{f}(a, b, fa, fm, fb, whole, tol, 60);
}

double quarter_period(double c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("quarter_period: c must lie in (0,1)");
    const double m = 1.0 - c * c;
    auto f = [&](double beta) {
        const double s = std::sin(beta);
        return c / std::sqrt(c * c + m * s * s);
    };
    return adaptive_simpson(f, 0.0, kHalfPi, 1e-13);
}

double period_upper_bound(double c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("period_upper_bound: c must lie in (0,1)");
    return 2.0 * kPi * std::sqrt(2.0 * c / (1.0 + c));
}

double half_period_length(double c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("half_period_length: c must lie in (0,1)");
    const double m = 1.0 - c * c;
    auto f = [&](double beta) {
        const double s = std::sin(beta);
        return std::sqrt(c * c + m * s * s);
    };
    return 2.0 * adaptive_simpson(f, 0.0, kHalfPi, 1e-13);
}

std::pair<double, double> closed_form_leaf(double kappa, double r) {
    if (!(kappa > 0.0 && kappa < kHalfPi)) {
        throw DomainError("closed_form_leaf: kappa must lie in (0, pi/2)");
    }
    if (r < 0.0 || r >= kHalfPi) throw DomainError("closed_form_leaf: r outside [0, pi/2)");
    const double x = std::tan(r) / std::tan(kappa);
    if (x < -1.0 || x > 1.0) throw DomainError("closed_form_leaf: tan r / tan kappa outside [-1,1]");
    const double phi = std::acos(x);
    const double cr = std::cos(r);
    return {phi, -std::sin(phi) * cr * cr * std::tan(kappa)};
}

double leaf_r_of_phi(double kappa, double phi) {
    return std::atan(std::tan(kappa) * std::cos(phi));
}

} // namespace geolab::geodesics
