#ifndef GEOLAB_SHOOTING_HPP
#define GEOLAB_SHOOTING_HPP

#include <utility>
#include <vector>

#include <json.hpp>

#include "geolab/geodesics.hpp"
#include "geolab/morse.hpp"

// Boundary geodesics of perturbed profiles. The phi-parametrized geodesic
// equation is singular at phi = 0, so shots start from the two-term boundary
// series r = r0 + (lambda'(r0)/4) phi^2, dr/dphi = (lambda'(r0)/2) phi at a
// small phi_start, integrate down the strip to the r = 0 crossing, and carry
// per-sample certificates of the barrier, monotonicity and convexity bounds.

namespace geolab::shooting {

using geodesics::Trajectory;
using metrics::LambdaProfile;

struct Certificates {
    bool barrier_ok = false;          // stays weakly left of the leaf through (r0, 0)
    bool monotone_ok = false;         // dr/dphi <= tol while r >= 0
    bool second_deriv_ok = false;     // d2r/dphi2 > lambda'(r) - tol while r >= 0
    bool convex_near_boundary_ok = false; // d2r/dphi2 <= 0 and negative
                                          // discriminant for phi <= band
};

struct Crossing {
    double phi0 = 0.0; // phi where the geodesic meets r = 0
    double alpha = 0.0; // dr/dphi there; always negative
};

struct ShootResult {
    double r0 = 0.0;
    double phi_start = 0.0;
    Trajectory trajectory; // phi-parametrized, from phi_start to the crossing
    Crossing crossing;
    Certificates certificates;
    /// Signed max over samples with r in [0, r0) of r_geodesic - r_leaf;
    /// strictly negative for strictly compliant profiles.
    double barrier_margin_max = 0.0;
    double max_drdphi = 0.0;          // max slope over r >= 0 samples
    double min_seconddiff = 0.0;      // min of d2r/dphi2 - lambda'(r)
    /// Angle atan(|alpha|) between the geodesic and the line r = 0 in the
    /// degenerate metric (conformal at r = 0).
    double metric_angle = 0.0;

    nlohmann::json to_json() const;
};

struct ShootOptions {
    double phi_start = 1e-3;
    double tol = 1e-10;
    /// Shot fails with NoCrossing if r = 0 is not reached by pi/2 + margin.
    double phi_margin = 0.2;
    double convex_band = 0.2;
    /// Series remainder C phi_start^3 must stay below this.
    double series_tol = 1e-6;
};

/// Launch the boundary geodesic through (r0, 0) and follow it to r = 0.
ShootResult shoot_from_boundary(const LambdaProfile& p, double r0, const ShootOptions& opt = {});

struct CrossingRow {
    double r0 = 0.0;
    double phi0 = 0.0;
    double alpha = 0.0;
    double alpha_bound = 0.0; // (pi/2) max |lambda'| over [0, r0]
    bool bound_ok = false;    // alpha_bound > |alpha| and alpha < 0
};

std::vector<CrossingRow> crossing_angle_curve(const LambdaProfile& p,
                                              const std::vector<double>& r0_list,
                                              const ShootOptions& opt = {});

struct StripPhase {
    double phi_arrival = 0.0;    // phi at r = -epsilon
    double drdphi_arrival = 0.0; // dr/dphi at r = -epsilon
    /// r values in (-epsilon, 0] where the path passes height phi0 with
    /// slope -alpha (descending), ordered 0 > r_1 > r_2 > ...
    std::vector<double> r_marks;
    int half_periods = 0; // = r_marks.size()
    Trajectory trajectory;
};

/// Product-metric traversal of the middle strip from (r = 0, phi0) with
/// slope alpha < 0, stopping at r = -epsilon.
StripPhase middle_strip_phase(double phi0, double alpha, double epsilon, double tol = 1e-10);

struct DoubleContact {
    double r0 = 0.0;
    double epsilon = 0.0;
    double phi0 = 0.0;
    double alpha = 0.0;
    /// Distance in (phi, dr/dphi) between the state at r = -epsilon and the
    /// reflection-symmetric target (phi0, -alpha).
    double residual = 0.0;
    int periods_in_strip = 0; // the branch index k
    int index_estimate = 0;   // Morse index of the middle-strip sub-arc

    nlohmann::json to_json() const;
};

/// Thrown when the scan finds fewer than n_targets roots; the message
/// reports how many and the partial list rides along.
class BracketExhaustedError : public Error {
public:
    BracketExhaustedError(const std::string& msg, std::vector<DoubleContact> found)
        : Error(msg), roots(std::move(found)) {}
    std::vector<DoubleContact> roots;
};

struct DoubleContactOptions {
    ShootOptions shoot{};
    double residual_tol = 1e-6;
    int scan_points = 240; // geometric r0 scan resolution per bracket
};

/// Locate double-boundary-contact geodesics of a reflected profile: roots of
/// r_k(r0) + epsilon = 0 where r_k is the k-th descending pass through
/// height phi0. The normalized phase (r_k + eps)/(r_i - r_{i+1}) is only
/// piecewise continuous across jumps of k, so each k branch is bracketed
/// separately (by the monotone count of passes inside the strip) and
/// bisected on its own.
std::vector<DoubleContact> find_double_contacts(const LambdaProfile& reflected, double epsilon,
                                                std::pair<double, double> r0_bracket, int n_targets,
                                                const DoubleContactOptions& opt = {});

/// Re-verify convexity near the boundary on an existing shot with a caller
/// band: d2r/dphi2 <= 0 and discriminant
/// (3/lambda)(3 lambda'^2/(4 lambda) - cot^2 phi) < 0 for phi <= phi_band.
bool convexity_check(const LambdaProfile& p, const ShootResult& result, double phi_band);

struct Continuation {
    double r_far = 0.0;   // boundary estimate of the far contact
    Trajectory strip;     // arc-length part, r = 0 down to r = -epsilon
    Trajectory tail;      // phi-parametrized part past r = -epsilon
};

/// Independently continue an accepted double contact past r = -epsilon down
/// to the far boundary; r_far should equal -epsilon - r0.
Continuation continue_to_far_boundary(const LambdaProfile& reflected, const DoubleContact& dc,
                                      const ShootOptions& opt = {});

} // namespace geolab::shooting

#endif
