#include <doctest.h>

#include <cmath>

#include "geolab/geodesics.hpp"
#include "oracles.hpp"

using namespace geolab;
using namespace geolab::geodesics;
using metrics::LambdaProfile;

namespace {
constexpr double kPi = 3.14159265358979323846;
const LambdaProfile kProduct = LambdaProfile::product();
const LambdaProfile kC1 = LambdaProfile::c1_cosine();
}

TEST_SUITE("geodesic") {

TEST_CASE("rhs on the equator vanishes") {
    const auto [rdd, pdd] = geodesic_rhs(kProduct, {0.0, kPi / 2.0, 1.0, 0.0, 0.0});
    CHECK(std::abs(rdd) < 1e-15);
    CHECK(std::abs(pdd) < 1e-15);
}

TEST_CASE("rhs hand examples") {
    // Vertical unit-speed state at phi = pi/4.
    const auto [rdd1, pdd1] = geodesic_rhs(kProduct, {0.0, kPi / 4.0, 0.0, std::sqrt(2.0), 0.0});
    CHECK(rdd1 == doctest::Approx(0.0));
    CHECK(pdd1 == doctest::Approx(-2.0).epsilon(1e-14));

    // Perturbed profile at the equator: only the lambda' terms survive.
    const auto [rdd2, pdd2] = geodesic_rhs(kC1, {kPi / 4.0, kPi / 2.0, std::sqrt(2.0), 0.0, 0.0});
    CHECK(rdd2 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(pdd2) < 1e-14);
}

TEST_CASE("rhs rejects the guard band") {
    CHECK_THROWS_AS((void)geodesic_rhs(kProduct, {0.0, 1e-9, 1.0, 0.0, 0.0}), DegeneracyError);
}

TEST_CASE("equator geodesic is a straight line with c = 1") {
    const auto traj = integrate_t(kProduct, {0.0, kPi / 2.0, 1.0, 0.0, 0.0}, 5.0);
    REQUIRE(traj.clairaut_c.has_value());
    CHECK(*traj.clairaut_c == doctest::Approx(1.0));
    for (const auto& s : traj.samples) {
        CHECK(s.r == doctest::Approx(s.t).epsilon(1e-12));
        CHECK(s.phi == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    }
    // Tangential contact with the equator: zero transversal events.
    for (const auto& ev : traj.events) {
        CHECK(ev.kind != EventKind::EquatorCrossing);
        CHECK(ev.kind != EventKind::TurningPoint);
    }
}

TEST_CASE("oscillating geodesic: confinement, conservation, periodicity") {
    const double c = 0.5;
    const double l = half_period_length(c);
    IntegrateOptions opt;
    opt.rtol = opt.atol = 1e-11;
    const auto s0 = turning_point_state(c, 0.0);
    const auto traj = integrate_t(kProduct, s0, 4.4 * l, opt);

    double worst_speed = 0.0, worst_c = 0.0, min_conf = 1.0;
    for (const auto& s : traj.samples) {
        worst_speed = std::max(worst_speed, std::abs(s.speed_sq(kProduct) - 1.0));
        worst_c = std::max(worst_c, std::abs(s.clairaut() - c));
        min_conf = std::min(min_conf, std::sin(s.phi) - c);
    }
    CHECK(worst_speed <= 1e-9);
    CHECK(worst_c <= 1e-9);
    CHECK(min_conf >= -1e-9);

    // Turning points sit at sin phi = c.
    int n_turn = 0;
    for (const auto& ev : traj.events) {
        if (ev.kind == EventKind::TurningPoint) {
            ++n_turn;
            CHECK(std::sin(ev.state.phi) == doctest::Approx(c).epsilon(1e-9));
        }
    }
    CHECK(n_turn >= 4);

    // Translation periodicity: states one full t-period apart agree.
    const double period_t = 2.0 * l;
    const auto a = traj.state_at(0.3);
    const auto b = traj.state_at(0.3 + period_t);
    CHECK(b.phi == doctest::Approx(a.phi).epsilon(1e-9));
    CHECK(b.rdot == doctest::Approx(a.rdot).epsilon(1e-9));
    CHECK(b.phidot == doctest::Approx(a.phidot).epsilon(1e-9));
}

TEST_CASE("full period r-advance matches the quadrature") {
    for (double c : {0.5, 0.01}) {
        IntegrateOptions opt;
        opt.rtol = opt.atol = 1e-11;
        const auto s0 = turning_point_state(c, 0.0);
        const auto traj = integrate_t(kProduct, s0, 2.2 * half_period_length(c), opt);
        bool seen = false;
        for (const auto& ev : traj.events) {
            if (ev.kind == EventKind::TurningPoint && ev.direction == 1) {
                CHECK(ev.state.r == doctest::Approx(4.0 * quarter_period(c)).epsilon(1e-9));
                seen = true;
                break;
            }
        }
        CHECK(seen);
    }
}

TEST_CASE("vertical geodesic terminates at the boundary guard") {
    // c = 0: phi decreases toward the boundary at constant r.
    const GeodesicState s0 = state_from_phi(kProduct, 0.7, 2.0, 0.0, -1, 0.0);
    IntegrateOptions opt;
    CHECK_THROWS_AS((void)integrate_t(kProduct, s0, 10.0, opt), BoundaryApproachError);

    opt.allow_boundary_contact = true;
    const auto traj = integrate_t(kProduct, s0, 10.0, opt);
    CHECK(traj.termination == Termination::BoundaryContact);
    REQUIRE_FALSE(traj.events.empty());
    CHECK(traj.events.back().kind == EventKind::BoundaryContact);
    CHECK(traj.samples.back().phi == doctest::Approx(metrics::kPhiGuard).epsilon(1e-3));
    CHECK(traj.samples.back().r == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("integrate_t rejects non-unit-speed starts") {
    CHECK_THROWS_AS((void)integrate_t(kProduct, {0.0, kPi / 2.0, 2.0, 0.0, 0.0}, 1.0),
                    DomainError);
}

TEST_CASE("phi integration reproduces the closed-form leaves") {
    for (double kappa : {kPi / 6.0, kPi / 4.0, kPi / 3.0}) {
        const auto [phi_f, slope_f] = closed_form_leaf(kappa, 0.0);
        CHECK(phi_f == doctest::Approx(kPi / 2.0));
        CHECK(slope_f == doctest::Approx(-std::tan(kappa)).epsilon(1e-14));
        const auto traj = integrate_phi(kC1, {0.0, slope_f, kPi / 2.0}, {kPi / 2.0, 0.2});
        double sup = 0.0;
        for (int i = 0; i <= 300; ++i) {
            const double phi = 0.2 + (kPi / 2.0 - 0.2) * i / 300.0;
            sup = std::max(sup, std::abs(traj.r_at_phi(phi) - leaf_r_of_phi(kappa, phi)));
        }
        CHECK(sup <= 1e-5);
        // Endpoint approaches (kappa, 0).
        CHECK(traj.r_at_phi(0.2) == doctest::Approx(leaf_r_of_phi(kappa, 0.2)).epsilon(1e-8));
    }
}

TEST_CASE("leaf endpoint tends to the boundary contact (kappa, 0)") {
    const double kappa = kPi / 6.0;
    const auto traj =
        integrate_phi(kC1, {0.0, -std::tan(kappa), kPi / 2.0}, {kPi / 2.0, 0.05});
    CHECK(traj.r_at_phi(0.05) == doctest::Approx(kappa).epsilon(2e-3));
}

TEST_CASE("vertical solution of the phi equation stays vertical") {
    const auto traj = integrate_phi(kProduct, {0.0, 0.0, kPi / 2.0}, {kPi / 2.0, 0.2});
    for (const auto& s : traj.samples) CHECK(std::abs(s.r) < 1e-14);
}

TEST_CASE("phi integration throws SlopeBlowup at turning points") {
    // Product geodesic with c = 0.5 descending toward sin phi = 0.5.
    const double c = 0.5;
    const double phi1 = std::asin(c);
    const double u0 = -c / std::sqrt(1.0 - c * c); // dr/dphi at the equator
    CHECK_THROWS_AS(
        (void)integrate_phi(kProduct, {0.0, u0, kPi / 2.0}, {kPi / 2.0, phi1 + 1e-4}),
        SlopeBlowupError);
}

TEST_CASE("t and phi parametrizations agree as point sets") {
    // A leaf arc of the C1 profile, integrated both ways.
    const double kappa = kPi / 4.0;
    const auto phi_traj =
        integrate_phi(kC1, {0.0, -std::tan(kappa), kPi / 2.0}, {kPi / 2.0, 0.5});

    const auto s0 = state_from_phi(kC1, 0.0, kPi / 2.0, -std::tan(kappa), -1, 0.0);
    IntegrateOptions opt;
    opt.stop_at_phi = 0.5;
    const auto t_traj = integrate_t(kC1, s0, 10.0, opt);
    REQUIRE(t_traj.termination == Termination::TerminalEvent);

    auto polyline = [](const Trajectory& tr, int n) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i <= n; ++i) {
            const auto s = tr.state_at(tr.t_begin() + (tr.t_end() - tr.t_begin()) * i / n);
            pts.emplace_back(s.r, s.phi);
        }
        return pts;
    };
    CHECK(oracles::hausdorff(polyline(phi_traj, 350), polyline(t_traj, 350)) <= 1e-6);
}

TEST_CASE("trajectory arc length equals elapsed t in both charts") {
    const double kappa = kPi / 4.0;
    const auto traj = integrate_phi(kC1, {0.0, -std::tan(kappa), kPi / 2.0}, {kPi / 2.0, 0.4});
    // ds/dphi integrates to the same t by an independent quadrature.
    auto integrand = [&](double phi) {
        const double r = traj.r_at_phi(phi);
        const double u = traj.drdphi_at_phi(phi);
        const double lam = kC1.lambda(r);
        return std::sin(phi) * std::sqrt(lam * (u * u + lam));
    };
    const double len = adaptive_simpson(integrand, 0.4, kPi / 2.0, 1e-12);
    CHECK(traj.arc_length() == doctest::Approx(len).epsilon(1e-9));
}

}
