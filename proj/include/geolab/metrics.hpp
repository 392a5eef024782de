#ifndef GEOLAB_METRICS_HPP
#define GEOLAB_METRICS_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "geolab/errors.hpp"

// Warping profiles lambda(r) and the induced degenerate metric
//
//     ds^2 = lambda(r) sin^2(phi) (dr^2 + lambda(r) dphi^2)
//
// on the strip R x [0, pi], together with its Gaussian curvature and the
// diagonal Ricci curvature of the corresponding 3-metric
// dr^2 + lambda(r)(dphi^2 + sin^2(phi) dtheta^2).

namespace geolab::metrics {

/// Pointwise operations reject phi outside [kPhiGuard, pi - kPhiGuard].
inline constexpr double kPhiGuard = 1e-6;

enum class ProfileKind { Product, C1Cosine, SmoothCompliant, Reflected };

/// Which one-sided value of lambda'' to report at a profile kink.
enum class DerivSide { Below, Above };

struct ProfileEval {
    double lambda;
    double dlambda;
    double ddlambda;
};

struct SmoothParams {
    double eta = 0.05;
    double r_flat = 1.0;
};

/// A warping profile with lambda(r) in [0, 1], lambda = 1 for r <= 0 and
/// lambda' <= 0 for r >= 0 (before reflection).
///
/// Kinds:
///   Product          lambda = 1 everywhere.
///   C1Cosine         lambda = cos^2 r on [0, pi/2], 1 for r < 0.
///   SmoothCompliant  lambda = cos^2 r - eta * exp(-1/(5r)) on (0, r_flat],
///                    continued past r_flat by a C^1 quadratic tail
///                    a (r_end - r)^2 that reaches 0 with lambda' = 0.
///                    The bump factor exp(-1/(5r)) is flat to all orders at
///                    r = 0 and strictly increasing, so for eta > 0 the
///                    squeeze is strictly faster than cos^2 r on (0, r_flat]
///                    while lambda'' <= 2 sin^2 r still holds. eta < 0 is
///                    accepted and produces a deliberately slow-squeezing
///                    profile (useful as a negative control); validity is
///                    the business of validate_profile, not the constructor.
///   Reflected        lambda(r) = inner(-eps - r) for r <= -eps, 1 on
///                    (-eps, 0), inner(r) for r >= 0.
class LambdaProfile {
public:
    static LambdaProfile product();
    static LambdaProfile c1_cosine();
    static LambdaProfile smooth_compliant(SmoothParams params = {});
    static LambdaProfile reflected(double epsilon, LambdaProfile inner);

    ProfileKind kind() const { return kind_; }
    bool is_product() const { return kind_ == ProfileKind::Product; }
    double epsilon() const { return epsilon_; }
    const SmoothParams& smooth_params() const { return smooth_; }
    const LambdaProfile& inner() const;

    /// lambda, lambda', lambda''. Throws DomainError past the admissible
    /// domain (where the formula would give lambda < 0).
    ProfileEval eval(double r, DerivSide side = DerivSide::Above) const;
    double lambda(double r) const { return eval(r).lambda; }
    double dlambda(double r) const { return eval(r).dlambda; }

    /// Largest admissible r (lambda >= 0 up to here); +inf for Product.
    double r_domain_max() const;
    /// Smallest admissible r; -inf except for Reflected profiles.
    double r_domain_min() const;

    nlohmann::json to_json() const;
    static LambdaProfile from_json(const nlohmann::json& j);
    std::string describe() const;

private:
    LambdaProfile() = default;

    ProfileKind kind_ = ProfileKind::Product;
    double epsilon_ = 0.0;
    SmoothParams smooth_{};
    // Derived tail data for SmoothCompliant: lambda = tail_a_ (r_end_ - r)^2
    // on (r_flat, r_end].
    double tail_a_ = 0.0;
    double r_end_ = 0.0;
    std::shared_ptr<const LambdaProfile> inner_;
};

/// Diagonal metric coefficients E = lambda sin^2 phi, G = lambda^2 sin^2 phi.
struct SurfaceMetric {
    LambdaProfile profile;

    /// (E, G) at (r, phi); enforces the phi guard band and lambda > 0.
    std::array<double, 2> coefficients(double r, double phi) const;
};

/// Gaussian curvature of the degenerate quotient metric,
///   K = [ 1/sin^4 phi + (lambda'^2/(2 lambda) - lambda'') / sin^2 phi ] / lambda^2,
/// which reduces to 1/sin^4 phi for the product profile.
double gaussian_curvature(const SurfaceMetric& m, double r, double phi);

/// Diagonal Ricci entries of the 3-metric:
///   ( lambda'^2/(2 lambda^2) - lambda''/lambda,
///     (1 - lambda''/2)/lambda,  (1 - lambda''/2)/lambda ).
std::array<double, 3> ricci_diagonal(const LambdaProfile& p, double r,
                                     DerivSide side = DerivSide::Above);

struct ConstraintReport {
    bool holds = true;
    double worst_margin = 0.0; // signed; <= 0 means satisfied
    double worst_r = 0.0;
};

struct ValidationReport {
    // lambda'(r) < -sin 2r (margin = lambda' + sin 2r, want < 0)
    ConstraintReport barrier;
    // lambda''(r) <= 2 sin^2 r (margin = lambda'' - 2 sin^2 r, want <= 0)
    ConstraintReport second_derivative;
    // lambda' = 0 wherever lambda = 0 (margin = max |lambda'| there)
    ConstraintReport zero_slope_at_zero;
    /// True when the barrier inequality is an equality at every grid point
    /// (the C^1 cosine profile).
    bool barrier_saturated = false;

    bool all_hold() const {
        return barrier.holds && second_derivative.holds && zero_slope_at_zero.holds;
    }
    nlohmann::json to_json() const;
};

/// Check the profile inequalities on a uniform grid over (0, r_max].
/// Violations are report content, never exceptions.
ValidationReport validate_profile(const LambdaProfile& p, double r_max, int grid_n);

} // namespace geolab::metrics

#endif
