#ifndef GEOLAB_GEODESICS_HPP
#define GEOLAB_GEODESICS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geolab/metrics.hpp"
#include "geolab/ode.hpp"

// Geodesic flow of ds^2 = lambda(r) sin^2(phi) (dr^2 + lambda(r) dphi^2) in
// two parametrizations:
//
//   arc length t:   r'' = -2 cot(phi) r' p' - (lambda'/2lambda) r'^2 + lambda' p'^2
//                   p'' =  cot(phi) (r'^2/lambda - p'^2) - 2 (lambda'/lambda) r' p'
//
//   phi:            d2r/dphi2 = -(cot phi/lambda) u^3 + (3/2)(lambda'/lambda) u^2
//                               - cot(phi) u + lambda',   u = dr/dphi.
//
// Arc-length parametrization degenerates at the boundary phi -> 0 where the
// metric vanishes; phi-parametrization degenerates at turning points where
// |dr/dphi| blows up. Each chart is used where the other is singular.

namespace geolab::geodesics {

using metrics::LambdaProfile;

struct GeodesicState {
    double r = 0.0;
    double phi = 0.0;
    double rdot = 0.0;
    double phidot = 0.0;
    double t = 0.0;

    /// (rdot^2 + lambda phidot^2) lambda sin^2 phi; 1 on unit-speed geodesics.
    double speed_sq(const LambdaProfile& p) const;
    /// Instantaneous Clairaut quantity rdot sin^2 phi (conserved on the
    /// product profile).
    double clairaut() const;
};

struct PhiState {
    double r = 0.0;
    double drdphi = 0.0;
    double phi = 0.0;
};

enum class EventKind {
    EquatorCrossing,  // phi = pi/2, transversal; direction = sign(phidot)
    TurningPoint,     // phidot = 0; direction = +1 lower (phi < pi/2), -1 upper
    MidlineZero,      // r = 0 crossing
    MidlineMinusEps,  // r = -epsilon crossing
    BoundaryContact,  // entered the phi guard band
};

std::string event_kind_name(EventKind k);

struct Event {
    EventKind kind;
    double t;
    GeodesicState state;
    int direction = 0;
};

enum class Termination { ReachedEnd, TerminalEvent, BoundaryContact };

/// A sampled geodesic with dense output, located events and conserved data.
struct Trajectory {
    LambdaProfile profile = LambdaProfile::product();
    std::vector<GeodesicState> samples; // strictly increasing t
    std::vector<Event> events;          // sorted by t
    std::optional<double> clairaut_c;   // set on product-profile runs
    Termination termination = Termination::ReachedEnd;

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }
    double arc_length() const { return t_end() - t_begin(); }

    /// Dense state at any t in [t_begin, t_end].
    GeodesicState state_at(double t) const;

    /// For phi-parametrized trajectories only: r(phi) and dr/dphi(phi).
    double r_at_phi(double phi) const;
    double drdphi_at_phi(double phi) const;
    bool is_phi_parametrized() const { return !phi_dense.empty(); }

    /// r values (ordered by t) where the path crosses the level phi = level
    /// with the given sign of phidot (+1 ascending, -1 descending, 0 any).
    std::vector<GeodesicState> level_crossings(double level, int phidot_sign) const;

    // Dense storage; exactly one of the two is populated.
    std::vector<ode::DenseStep<4>> t_dense;   // y = (r, phi, rdot, phidot)
    std::vector<ode::DenseStep<3>> phi_dense; // y = (r, u, t) over phi
    int phi_dir = 1;                          // sign of dphi along the motion
};

/// Right-hand side (rddot, phiddot) of the arc-length geodesic system.
std::pair<double, double> geodesic_rhs(const LambdaProfile& p, const GeodesicState& s);

/// d2r/dphi2 from the cubic-in-dr/dphi implicit form.
double geodesic_rhs_phi(const LambdaProfile& p, double r, double drdphi, double phi);

/// Unit-speed state through (r, phi) with direction dr/dphi = drdphi and the
/// given sign of phidot.
GeodesicState state_from_phi(const LambdaProfile& p, double r, double phi, double drdphi,
                             int phidot_sign, double t = 0.0);

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double event_tol = 1e-12;
    double h_max = 0.25;
    double phi_guard = metrics::kPhiGuard;
    /// Terminate with a BoundaryContact event instead of throwing
    /// BoundaryApproachError when the guard band is entered.
    bool allow_boundary_contact = false;
    std::optional<double> stop_at_r;   // terminal r level
    std::optional<double> stop_at_phi; // terminal phi level
    std::size_t max_steps = 20'000'000;
};

/// Adaptive arc-length integration to t_end with event location by dense
/// bisection. Crossing events are recorded only when transversal.
Trajectory integrate_t(const LambdaProfile& p, const GeodesicState& s0, double t_end,
                       const IntegrateOptions& opt = {});

struct IntegratePhiOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double event_tol = 1e-12;
    /// |dr/dphi| beyond this throws SlopeBlowupError: switch to integrate_t.
    double slope_limit = 50.0;
    std::optional<double> stop_at_r; // terminal r level
    double t0 = 0.0;                 // arc-length offset of the start
    std::size_t max_steps = 20'000'000;
};

/// Integrate the phi-parametrized form over phi_span (either direction); the
/// result carries arc length t accumulated from ds/dphi = sin(phi)
/// sqrt(lambda (u^2 + lambda)) so it converts to a unit-speed trajectory.
Trajectory integrate_phi(const LambdaProfile& p, const PhiState& s0,
                         std::pair<double, double> phi_span,
                         const IntegratePhiOptions& opt = {});

/// Quarter period in r of the product-profile geodesic with minimum
/// sin(phi) = c, by the desingularized quadrature
///   integral_0^{pi/2} c / sqrt(c^2 + (1 - c^2) sin^2 beta) dbeta.
double quarter_period(double c);

/// Upper bound 2 pi sqrt(2c/(1+c)) for the full period in r.
double period_upper_bound(double c);

/// ds-length of the half-period piece (equator to minimum and back):
///   2 integral_0^{pi/2} sqrt(c^2 + (1 - c^2) sin^2 beta) dbeta  >= 2.
double half_period_length(double c);

/// Leaf of the C^1 foliation cos(phi) = tan(r)/tan(kappa):
/// returns (phi, dr/dphi) at the given r, with dr/dphi = -sin(phi) cos^2(r) tan(kappa).
std::pair<double, double> closed_form_leaf(double kappa, double r);

/// r(phi) = arctan(tan(kappa) cos(phi)) along the same leaf.
double leaf_r_of_phi(double kappa, double phi);

/// Unit-speed state at the lower turning point of the product geodesic with
/// Clairaut constant c, placed at the given r (moving toward increasing r).
GeodesicState turning_point_state(double c, double r);

/// Adaptive quadrature used by the period integrals (exposed for tests).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

} // namespace geolab::geodesics

#endif
