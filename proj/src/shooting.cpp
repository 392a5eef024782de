#include "geolab/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace geolab::shooting {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 1.57079632679489661923;
// Weak-inequality slack for the barrier certificate: the C^1 cosine profile
// saturates the barrier, so its shot rides the leaf up to integration error.
constexpr double kBarrierTol = 1e-7;
constexpr double kMonotoneTol = 1e-9;
// The C^1 cosine profile also saturates the second-derivative comparison at
// its crossing (both sides tend to 0 there), so this slack must sit above
// integration noise as well.
constexpr double kSecondDerivTol = 1e-7;

double discriminant(const metrics::ProfileEval& e, double phi) {
    const double cot = std::cos(phi) / std::sin(phi);
    return 3.0 / e.lambda * (0.75 * e.dlambda * e.dlambda / e.lambda - cot * cot);
}

} // namespace

ShootResult shoot_from_boundary(const LambdaProfile& p, double r0, const ShootOptions& opt) {
    if (p.is_product()) {
        throw DomainError("shoot_from_boundary: the product profile has no boundary geodesics at r0 > 0");
    }
    if (!(r0 > 0.0)) throw DomainError("shoot_from_boundary: r0 must be positive");
    if (!(p.lambda(r0) > 0.0)) throw PoleError("shoot_from_boundary: lambda(r0) = 0");
    const double phi_s = opt.phi_start;
    if (!(phi_s > 0.0 && phi_s < 0.1)) {
        throw DomainError("shoot_from_boundary: phi_start must lie in (0, 0.1)");
    }

    const double dlam0 = p.dlambda(r0);

    // Two-term boundary series. The remainder is O(phi^4) by the evenness of
    // r(phi) at an orthogonal contact; estimate the quartic coefficient by
    // finite differences of the second derivative along the series.
    auto series_r = [&](double phi) { return r0 + 0.25 * dlam0 * phi * phi; };
    auto series_u = [&](double phi) { return 0.5 * dlam0 * phi; };
    {
        const double h1 = 2.0 * phi_s, h2 = 3.0 * phi_s;
        const double d1 = geodesics::geodesic_rhs_phi(p, series_r(h1), series_u(h1), h1);
        const double d2 = geodesics::geodesic_rhs_phi(p, series_r(h2), series_u(h2), h2);
        const double quartic = std::abs(d2 - d1) / (h2 * h2 - h1 * h1); // ~ |r''''|/12
        const double remainder = quartic * phi_s * phi_s * phi_s * phi_s;
        if (remainder > opt.series_tol) {
            throw SeriesInvalidError("shoot_from_boundary: series remainder above tolerance; reduce phi_start");
        }
    }

    geodesics::PhiState s0{series_r(phi_s), series_u(phi_s), phi_s};

    geodesics::IntegratePhiOptions iopt;
    iopt.rtol = iopt.atol = opt.tol;
    iopt.stop_at_r = 0.0;

    Trajectory traj = geodesics::integrate_phi(p, s0, {phi_s, kHalfPi + opt.phi_margin}, iopt);
    if (traj.termination != geodesics::Termination::TerminalEvent) {
        throw NoCrossingError("shoot_from_boundary: geodesic failed to reach r = 0 before pi/2 + margin");
    }

    ShootResult res;
    res.r0 = r0;
    res.phi_start = phi_s;
    res.crossing.phi0 = traj.samples.back().phi;
    res.crossing.alpha = traj.drdphi_at_phi(res.crossing.phi0);
    res.metric_angle = std::atan(std::abs(res.crossing.alpha));

    // Per-sample certificates over the shot, on a fixed phi grid refined from
    // the dense output.
    bool barrier = true, monotone = true, second = true, convex = true;
    double barrier_margin = -std::numeric_limits<double>::infinity();
    double max_u = -std::numeric_limits<double>::infinity();
    double min_sd = std::numeric_limits<double>::infinity();
    const int n_grid = 2000;
    for (int i = 0; i <= n_grid; ++i) {
        const double phi = phi_s + (res.crossing.phi0 - phi_s) * i / n_grid;
        const double r = traj.r_at_phi(phi);
        const double u = traj.drdphi_at_phi(phi);
        if (r < 0.0) continue;
        const metrics::ProfileEval e = p.eval(r);
        const double d2r = geodesics::geodesic_rhs_phi(p, r, u, phi);

        if (r < r0) {
            const double margin = r - geodesics::leaf_r_of_phi(r0, phi);
            barrier_margin = std::max(barrier_margin, margin);
            if (margin > kBarrierTol) barrier = false;
        }
        max_u = std::max(max_u, u);
        if (u > kMonotoneTol) monotone = false;
        min_sd = std::min(min_sd, d2r - e.dlambda);
        if (!(d2r > e.dlambda - kSecondDerivTol)) second = false;
        if (phi <= opt.convex_band) {
            if (d2r > 0.0 || discriminant(e, phi) >= 0.0) convex = false;
        }
    }
    res.certificates = {barrier, monotone, second, convex};
    res.barrier_margin_max = barrier_margin;
    res.max_drdphi = max_u;
    res.min_seconddiff = min_sd;
    res.trajectory = std::move(traj);
    return res;
}

std::vector<CrossingRow> crossing_angle_curve(const LambdaProfile& p,
                                              const std::vector<double>& r0_list,
                                              const ShootOptions& opt) {
    std::vector<CrossingRow> rows;
    rows.reserve(r0_list.size());
    for (double r0 : r0_list) {
        const ShootResult res = shoot_from_boundary(p, r0, opt);
        CrossingRow row;
        row.r0 = r0;
        row.phi0 = res.crossing.phi0;
        row.alpha = res.crossing.alpha;
        // max |lambda'| over [0, r0] on a fine grid.
        double worst = 0.0;
        const int n = 400;
        for (int i = 1; i <= n; ++i) {
            worst = std::max(worst, std::abs(p.dlambda(r0 * i / static_cast<double>(n))));
        }
        row.alpha_bound = kHalfPi * worst;
        row.bound_ok = row.alpha < 0.0 && std::abs(row.alpha) < row.alpha_bound;
        rows.push_back(row);
    }
    return rows;
}

StripPhase middle_strip_phase(double phi0, double alpha, double epsilon, double tol) {
    if (!(alpha < 0.0)) throw DomainError("middle_strip_phase: alpha must be negative");
    if (!(epsilon > 0.0)) throw DomainError("middle_strip_phase: epsilon must be positive");
    if (!(phi0 > metrics::kPhiGuard && phi0 < kPi - metrics::kPhiGuard)) {
        throw DomainError("middle_strip_phase: phi0 outside the strip interior");
    }

    const auto product = metrics::LambdaProfile::product();
    // Entering the strip: r decreasing, phi increasing.
    const auto s0 = geodesics::state_from_phi(product, 0.0, phi0, alpha, +1, 0.0);

    geodesics::IntegrateOptions opt;
    opt.rtol = opt.atol = tol;
    opt.stop_at_r = -epsilon;
    // The traversal spends |c|/sin^2(phi) <= 1 in |rdot|, so t is bounded by
    // epsilon / min|rdot|; pad generously and rely on the terminal event.
    const double c = std::abs(s0.clairaut());
    const double t_budget = epsilon / c * 1.1 + 10.0;

    StripPhase out;
    out.trajectory = geodesics::integrate_t(product, s0, t_budget, opt);
    if (out.trajectory.termination != geodesics::Termination::TerminalEvent) {
        throw StepFailureError("middle_strip_phase: r = -epsilon not reached within budget");
    }

    const auto& last = out.trajectory.samples.back();
    out.phi_arrival = last.phi;
    out.drdphi_arrival = last.rdot / last.phidot;

    for (const auto& s : out.trajectory.level_crossings(phi0, -1)) {
        if (s.r > -epsilon && s.r <= 0.0) out.r_marks.push_back(s.r);
    }
    out.half_periods = static_cast<int>(out.r_marks.size());
    return out;
}

namespace {

struct ScanPoint {
    double r0 = 0.0;
    int marks = 0;
};

// Shoot + strip traversal; returns the number of descending phi0 passes
// inside the strip together with the crossing data.
ScanPoint evaluate_marks(const LambdaProfile& p, double eps, double r0, const ShootOptions& sopt,
                         Crossing* crossing = nullptr, StripPhase* strip = nullptr) {
    const ShootResult shot = shoot_from_boundary(p, r0, sopt);
    StripPhase phase = middle_strip_phase(shot.crossing.phi0, shot.crossing.alpha, eps, sopt.tol);
    if (crossing) *crossing = shot.crossing;
    ScanPoint pt{r0, phase.half_periods};
    if (strip) *strip = std::move(phase);
    return pt;
}

} // namespace

std::vector<DoubleContact> find_double_contacts(const LambdaProfile& reflected, double epsilon,
                                                std::pair<double, double> r0_bracket, int n_targets,
                                                const DoubleContactOptions& opt) {
    if (reflected.kind() != metrics::ProfileKind::Reflected) {
        throw DomainError("find_double_contacts: profile must be reflected");
    }
    if (std::abs(reflected.epsilon() - epsilon) > 1e-14) {
        throw DomainError("find_double_contacts: epsilon does not match the profile");
    }
    if (n_targets < 1) throw DomainError("find_double_contacts: n_targets must be >= 1");
    double lo = std::min(r0_bracket.first, r0_bracket.second);
    double hi = std::max(r0_bracket.first, r0_bracket.second);
    if (!(lo > 0.0)) throw DomainError("find_double_contacts: bracket must be positive");

    // Geometric scan from hi down to lo; the pass count is nondecreasing as
    // r0 shrinks, and each jump past k brackets the k-th branch root.
    std::vector<ScanPoint> scan;
    scan.reserve(opt.scan_points + 1);
    const double ratio = std::pow(lo / hi, 1.0 / opt.scan_points);
    double r0 = hi;
    for (int i = 0; i <= opt.scan_points; ++i, r0 *= ratio) {
        scan.push_back(evaluate_marks(reflected, epsilon, r0, opt.shoot));
    }

    std::vector<DoubleContact> roots;
    for (int k = 1; k <= n_targets; ++k) {
        // Bracket: marks < k at a, marks >= k at b with a > b.
        double ra = 0.0, rb = 0.0;
        bool found = false;
        for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
            if (scan[i].marks < k && scan[i + 1].marks >= k) {
                ra = scan[i].r0;
                rb = scan[i + 1].r0;
                found = true;
                break;
            }
        }
        if (!found) break;

        // Bisect the count predicate to machine width in r0.
        for (int it = 0; it < 80 && (ra - rb) > 1e-16 * ra; ++it) {
            const double rm = 0.5 * (ra + rb);
            const ScanPoint pm = evaluate_marks(reflected, epsilon, rm, opt.shoot);
            if (pm.marks >= k) {
                rb = rm;
            } else {
                ra = rm;
            }
        }

        // Accept the side where the k-th pass is inside the strip and measure
        // the arrival mismatch against the reflection-symmetric target.
        DoubleContact dc;
        dc.r0 = rb;
        dc.epsilon = epsilon;
        Crossing crossing;
        StripPhase strip;
        evaluate_marks(reflected, epsilon, rb, opt.shoot, &crossing, &strip);
        dc.phi0 = crossing.phi0;
        dc.alpha = crossing.alpha;
        dc.residual = std::hypot(strip.phi_arrival - crossing.phi0,
                                 strip.drdphi_arrival + crossing.alpha);
        dc.periods_in_strip = k;
        dc.index_estimate = morse::jacobi_zeros(strip.trajectory, opt.shoot.tol).index;
        if (dc.residual > opt.residual_tol) {
            std::ostringstream os;
            os << "find_double_contacts: branch " << k << " residual " << dc.residual
               << " above tolerance";
            throw BracketExhaustedError(os.str(), std::move(roots));
        }
        roots.push_back(dc);
    }

    if (static_cast<int>(roots.size()) < n_targets) {
        std::ostringstream os;
        os << "find_double_contacts: found " << roots.size() << " of " << n_targets
           << " requested roots in the bracket";
        throw BracketExhaustedError(os.str(), std::move(roots));
    }
    return roots;
}

bool convexity_check(const LambdaProfile& p, const ShootResult& result, double phi_band) {
    if (p.is_product()) {
        throw DomainError("convexity_check: product profile has no boundary shots");
    }
    if (!(phi_band > result.phi_start)) {
        throw DomainError("convexity_check: phi_band must exceed phi_start");
    }
    const double phi_hi = std::min(phi_band, result.crossing.phi0);
    const int n = 800;
    for (int i = 0; i <= n; ++i) {
        const double phi = result.phi_start + (phi_hi - result.phi_start) * i / n;
        const double r = result.trajectory.r_at_phi(phi);
        const double u = result.trajectory.drdphi_at_phi(phi);
        const double d2r = geodesics::geodesic_rhs_phi(p, r, u, phi);
        if (d2r > 0.0) return false;
        if (discriminant(p.eval(r), phi) >= 0.0) return false;
    }
    return true;
}

Continuation continue_to_far_boundary(const LambdaProfile& reflected, const DoubleContact& dc,
                                      const ShootOptions& opt) {
    Continuation out;

    // Arc-length part across the product strip, stopping at r = -epsilon.
    const auto entry =
        geodesics::state_from_phi(reflected, 0.0, dc.phi0, dc.alpha, +1, 0.0);
    geodesics::IntegrateOptions iopt;
    iopt.rtol = iopt.atol = opt.tol;
    iopt.stop_at_r = -dc.epsilon;
    const double c = std::abs(entry.clairaut());
    out.strip = geodesics::integrate_t(reflected, entry, dc.epsilon / c * 1.1 + 10.0, iopt);
    if (out.strip.termination != geodesics::Termination::TerminalEvent) {
        throw StepFailureError("continue_to_far_boundary: strip traversal incomplete");
    }
    const auto& arrival = out.strip.samples.back();

    // Phi-parametrized tail down to the far boundary. Past r = -epsilon the
    // mirrored monotonicity bound keeps dr/dphi finite, so the phi chart is
    // regular all the way down.
    geodesics::PhiState tail0{arrival.r, arrival.rdot / arrival.phidot, arrival.phi};
    geodesics::IntegratePhiOptions popt;
    popt.rtol = popt.atol = opt.tol;
    popt.t0 = arrival.t;
    out.tail = geodesics::integrate_phi(reflected, tail0, {arrival.phi, opt.phi_start}, popt);

    // Invert the boundary series at the far end: r(phi) = r_far + (lambda'(r_far)/4) phi^2.
    const auto& end = out.tail.samples.back();
    const double r_est = end.r - 0.25 * reflected.dlambda(end.r) * end.phi * end.phi;
    out.r_far = end.r - 0.25 * reflected.dlambda(r_est) * end.phi * end.phi;
    return out;
}

nlohmann::json ShootResult::to_json() const {
    return nlohmann::json{
        {"r0", r0},
        {"phi_start", phi_start},
        {"crossing", {{"phi0", crossing.phi0}, {"alpha", crossing.alpha}}},
        {"certificates",
         {{"barrier_ok", certificates.barrier_ok},
          {"monotone_ok", certificates.monotone_ok},
          {"second_deriv_ok", certificates.second_deriv_ok},
          {"convex_near_boundary_ok", certificates.convex_near_boundary_ok}}},
        {"barrier_margin_max", barrier_margin_max},
        {"max_drdphi", max_drdphi},
        {"min_seconddiff", min_seconddiff},
        {"metric_angle", metric_angle}};
}

nlohmann::json DoubleContact::to_json() const {
    return nlohmann::json{{"r0", r0},
                          {"epsilon", epsilon},
                          {"phi0", phi0},
                          {"alpha", alpha},
                          {"residual", residual},
                          {"periods_in_strip", periods_in_strip},
                          {"index_estimate", index_estimate}};
}

} // namespace geolab::shooting
