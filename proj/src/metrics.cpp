#include "geolab/metrics.hpp"

#include <cmath>
#include <sstream>

namespace geolab::metrics {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Scale of the flat bump s(r) = exp(-kBumpScale / r). Fixed rather than a
// free parameter: with eta = 0.05 the dip of eta * s'' must stay above
// -2 cos^2 r for the lambda'' constraint, which pins kBumpScale >= ~0.15.
constexpr double kBumpScale = 0.2;

// s, s', s'' of the flat bump; identically 0 for r <= 0.
void bump(double r, double& s, double& s1, double& s2) {
    if (r <= 0.0) {
        s = s1 = s2 = 0.0;
        return;
    }
    const double x = kBumpScale / r;
    const double e = std::exp(-x);
    s = e;
    s1 = e * kBumpScale / (r * r);
    s2 = e * (kBumpScale * kBumpScale / (r * r) - 2.0 * kBumpScale / r) / (r * r);
}

} // namespace

LambdaProfile LambdaProfile::product() {
    LambdaProfile p;
    p.kind_ = ProfileKind::Product;
    return p;
}

LambdaProfile LambdaProfile::c1_cosine() {
    LambdaProfile p;
    p.kind_ = ProfileKind::C1Cosine;
    return p;
}

LambdaProfile LambdaProfile::smooth_compliant(SmoothParams params) {
    if (!(params.r_flat > 0.0) || params.r_flat >= kPi / 2.0) {
        throw DomainError("smooth_compliant: r_flat must lie in (0, pi/2)");
    }
    LambdaProfile p;
    p.kind_ = ProfileKind::SmoothCompliant;
    p.smooth_ = params;

    double s, s1, s2;
    bump(params.r_flat, s, s1, s2);
    const double lam_f = std::cos(params.r_flat) * std::cos(params.r_flat) - params.eta * s;
    const double dlam_f = -std::sin(2.0 * params.r_flat) - params.eta * s1;
    if (!(lam_f > 0.0) || !(dlam_f < 0.0)) {
        throw DomainError("smooth_compliant: profile not positive and decreasing at r_flat");
    }
    // C^1 quadratic tail a (r_end - r)^2 matching value and slope at r_flat.
    p.r_end_ = params.r_flat + 2.0 * lam_f / (-dlam_f);
    p.tail_a_ = dlam_f * dlam_f / (4.0 * lam_f);
    return p;
}

LambdaProfile LambdaProfile::reflected(double epsilon, LambdaProfile inner) {
    if (!(epsilon > 0.0)) {
        throw DomainError("reflected: epsilon must be positive");
    }
    if (inner.kind_ == ProfileKind::Reflected) {
        throw DomainError("reflected: nesting reflected profiles is not supported");
    }
    LambdaProfile p;
    p.kind_ = ProfileKind::Reflected;
    p.epsilon_ = epsilon;
    p.inner_ = std::make_shared<const LambdaProfile>(std::move(inner));
    return p;
}

const LambdaProfile& LambdaProfile::inner() const {
    if (!inner_) throw DomainError("inner(): profile is not reflected");
    return *inner_;
}

double LambdaProfile::r_domain_max() const {
    switch (kind_) {
        case ProfileKind::Product: return std::numeric_limits<double>::infinity();
        case ProfileKind::C1Cosine: return kPi / 2.0;
        case ProfileKind::SmoothCompliant: return r_end_;
        case ProfileKind::Reflected: return inner_->r_domain_max();
    }
    return 0.0;
}

double LambdaProfile::r_domain_min() const {
    if (kind_ == ProfileKind::Reflected) {
        return -epsilon_ - inner_->r_domain_max();
    }
    return -std::numeric_limits<double>::infinity();
}

ProfileEval LambdaProfile::eval(double r, DerivSide side) const {
    switch (kind_) {
        case ProfileKind::Product:
            return {1.0, 0.0, 0.0};

        case ProfileKind::C1Cosine: {
            if (r < 0.0 || (r == 0.0 && side == DerivSide::Below)) {
                return {1.0, 0.0, 0.0};
            }
            if (r > kPi / 2.0) {
                throw DomainError("c1cosine profile: r beyond pi/2 (lambda < 0 region)");
            }
            const double c = std::cos(r);
            return {c * c, -std::sin(2.0 * r), -2.0 * std::cos(2.0 * r)};
        }

        case ProfileKind::SmoothCompliant: {
            if (r < 0.0 || (r == 0.0 && side == DerivSide::Below)) {
                return {1.0, 0.0, 0.0};
            }
            if (r > r_end_) {
                throw DomainError("smooth profile: r beyond the zero of lambda");
            }
            if (r <= smooth_.r_flat) {
                double s, s1, s2;
                bump(r, s, s1, s2);
                const double c = std::cos(r);
                return {c * c - smooth_.eta * s,
                        -std::sin(2.0 * r) - smooth_.eta * s1,
                        -2.0 * std::cos(2.0 * r) - smooth_.eta * s2};
            }
            const double d = r_end_ - r;
            return {tail_a_ * d * d, -2.0 * tail_a_ * d, 2.0 * tail_a_};
        }

        case ProfileKind::Reflected: {
            if (r >= 0.0) {
                if (r == 0.0 && side == DerivSide::Below) return {1.0, 0.0, 0.0};
                return inner_->eval(r, side);
            }
            if (r > -epsilon_) {
                return {1.0, 0.0, 0.0};
            }
            // lambda(r) = inner(-eps - r): slope flips sign, curvature does not.
            const DerivSide flipped = (side == DerivSide::Above) ? DerivSide::Below : DerivSide::Above;
            const ProfileEval e = inner_->eval(-epsilon_ - r, flipped);
            return {e.lambda, -e.dlambda, e.ddlambda};
        }
    }
    throw DomainError("eval: unknown profile kind");
}

nlohmann::json LambdaProfile::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case ProfileKind::Product: j["kind"] = "product"; break;
        case ProfileKind::C1Cosine: j["kind"] = "c1cosine"; break;
        case ProfileKind::SmoothCompliant:
            j["kind"] = "smooth";
            j["eta"] = smooth_.eta;
            j["r_flat"] = smooth_.r_flat;
            break;
        case ProfileKind::Reflected:
            j["kind"] = "reflected";
            j["epsilon"] = epsilon_;
            j["inner"] = inner_->to_json();
            break;
    }
    return j;
}

LambdaProfile LambdaProfile::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "product") return product();
    if (kind == "c1cosine") return c1_cosine();
    if (kind == "smooth") {
        SmoothParams sp;
        if (j.contains("eta")) sp.eta = j.at("eta").get<double>();
        if (j.contains("r_flat")) sp.r_flat = j.at("r_flat").get<double>();
        return smooth_compliant(sp);
    }
    if (kind == "reflected") {
        return reflected(j.at("epsilon").get<double>(), from_json(j.at("inner")));
    }
    throw DomainError("profile json: unknown kind '" + kind + "'");
}

std::string LambdaProfile::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case ProfileKind::Product: os << "product"; break;
        case ProfileKind::C1Cosine: os << "c1cosine"; break;
        case ProfileKind::SmoothCompliant:
            os << "smooth(eta=" << smooth_.eta << ", r_flat=" << smooth_.r_flat << ")";
            break;
        case ProfileKind::Reflected:
            os << "reflected(eps=" << epsilon_ << ", " << inner_->describe() << ")";
            break;
    }
    return os.str();
}

std::array<double, 2> SurfaceMetric::coefficients(double r, double phi) const {
    if (phi < kPhiGuard || phi > kPi - kPhiGuard) {
        throw DegeneracyError("metric coefficients requested on the degenerate boundary");
    }
    const double lam = profile.lambda(r);
    const double s2 = std::sin(phi) * std::sin(phi);
    return {lam * s2, lam * lam * s2};
}

double gaussian_curvature(const SurfaceMetric& m, double r, double phi) {
    if (phi < kPhiGuard || phi > kPi - kPhiGuard) {
        throw DegeneracyError("gaussian_curvature on the degenerate boundary");
    }
    const ProfileEval e = m.profile.eval(r);
    if (!(e.lambda > 0.0)) {
        throw PoleError("gaussian_curvature: lambda(r) = 0");
    }
    const double s2 = std::sin(phi) * std::sin(phi);
    const double corr = e.dlambda * e.dlambda / (2.0 * e.lambda) - e.ddlambda;
    return (1.0 / (s2 * s2) + corr / s2) / (e.lambda * e.lambda);
}

std::array<double, 3> ricci_diagonal(const LambdaProfile& p, double r, DerivSide side) {
    const ProfileEval e = p.eval(r, side);
    if (!(e.lambda > 0.0)) {
        throw PoleError("ricci_diagonal: lambda(r) = 0");
    }
    const double rr = 0.5 * e.dlambda * e.dlambda / (e.lambda * e.lambda) - e.ddlambda / e.lambda;
    const double tt = (1.0 - 0.5 * e.ddlambda) / e.lambda;
    return {rr, tt, tt};
}

ValidationReport validate_profile(const LambdaProfile& p, double r_max, int grid_n) {
    if (grid_n < 2) throw DomainError("validate_profile: grid_n must be >= 2");
    if (!(r_max > 0.0)) throw DomainError("validate_profile: r_max must be positive");

    ValidationReport rep;
    rep.barrier.worst_margin = -std::numeric_limits<double>::infinity();
    rep.second_derivative.worst_margin = -std::numeric_limits<double>::infinity();
    rep.zero_slope_at_zero.worst_margin = 0.0;
    bool saturated = true;

    constexpr double kLambdaZeroTol = 1e-12;
    constexpr double kSlopeTol = 1e-9;

    for (int i = 1; i <= grid_n; ++i) {
        const double r = r_max * static_cast<double>(i) / grid_n;
        const ProfileEval e = p.eval(r);

        // Equality does not count as a violation: the C^1 profile saturates
        // the barrier bit-exactly (lambda' computed as -sin 2r), and flat
        // bumps push the margin below the ulp of sin 2r as r -> 0.
        const double bar = e.dlambda + std::sin(2.0 * r);
        if (bar > rep.barrier.worst_margin) {
            rep.barrier.worst_margin = bar;
            rep.barrier.worst_r = r;
        }
        if (bar > 0.0) rep.barrier.holds = false;
        if (std::abs(bar) > 1e-12) saturated = false;

        const double sec = e.ddlambda - 2.0 * std::sin(r) * std::sin(r);
        if (sec > rep.second_derivative.worst_margin) {
            rep.second_derivative.worst_margin = sec;
            rep.second_derivative.worst_r = r;
        }
        if (sec > 0.0) rep.second_derivative.holds = false;

        if (e.lambda <= kLambdaZeroTol) {
            const double sl = std::abs(e.dlambda);
            if (sl > rep.zero_slope_at_zero.worst_margin) {
                rep.zero_slope_at_zero.worst_margin = sl;
                rep.zero_slope_at_zero.worst_r = r;
            }
            if (sl > kSlopeTol) rep.zero_slope_at_zero.holds = false;
        }
    }
    rep.barrier_saturated = saturated;
    return rep;
}

nlohmann::json ValidationReport::to_json() const {
    auto c = [](const ConstraintReport& r) {
        return nlohmann::json{
            {"holds", r.holds}, {"worst_margin", r.worst_margin}, {"worst_r", r.worst_r}};
    };
    return nlohmann::json{{"barrier", c(barrier)},
                          {"second_derivative", c(second_derivative)},
                          {"zero_slope_at_zero", c(zero_slope_at_zero)},
                          {"barrier_saturated", barrier_saturated},
                          {"all_hold", all_hold()}};
}

} // namespace geolab::metrics
