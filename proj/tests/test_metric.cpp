#include <doctest.h>

#include <cmath>

#include "geolab/metrics.hpp"
#include "oracles.hpp"

using namespace geolab;
using metrics::LambdaProfile;
using metrics::SurfaceMetric;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("metric") {

TEST_CASE("product metric coefficients are sin^2 phi") {
    const SurfaceMetric m{LambdaProfile::product()};
    for (double phi : {0.3, 1.0, kPi / 2.0, 2.5}) {
        const auto [E, G] = m.coefficients(1.7, phi);
        const double s2 = std::sin(phi) * std::sin(phi);
        CHECK(E == doctest::Approx(s2).epsilon(1e-15));
        CHECK(G == doctest::Approx(s2).epsilon(1e-15));
    }
}

TEST_CASE("product curvature is 1/sin^4 phi") {
    const SurfaceMetric m{LambdaProfile::product()};
    CHECK(metrics::gaussian_curvature(m, 0.0, kPi / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(metrics::gaussian_curvature(m, 12.3, kPi / 4.0) == doctest::Approx(4.0).epsilon(1e-14));
    // On a grid with phi-margin 0.05: equals the closed form to 1e-8 and is
    // bounded below by 1.
    for (int i = 0; i <= 60; ++i) {
        const double phi = 0.05 + (kPi - 0.1) * i / 60.0;
        const double K = metrics::gaussian_curvature(m, -3.0 + 0.1 * i, phi);
        const double s = std::sin(phi);
        CHECK(std::abs(K - 1.0 / (s * s * s * s)) <= 1e-8 * std::abs(K));
        CHECK(K >= 1.0);
    }
}

TEST_CASE("curvature matches the finite-difference coefficient oracle") {
    struct Case {
        LambdaProfile p;
        double r, phi;
    };
    const Case cases[] = {
        {LambdaProfile::c1_cosine(), 0.3, 1.0},
        {LambdaProfile::c1_cosine(), 0.7, 2.0},
        {LambdaProfile::smooth_compliant(), 0.25, 0.9},
        {LambdaProfile::smooth_compliant(), 0.6, 1.8},
        {LambdaProfile::reflected(0.3, LambdaProfile::smooth_compliant()), -0.45, 1.2},
        {LambdaProfile::product(), 0.0, 0.8},
    };
    for (const auto& tc : cases) {
        const SurfaceMetric m{tc.p};
        const double got = metrics::gaussian_curvature(m, tc.r, tc.phi);
        const double ref = oracles::fd_gaussian_curvature(m, tc.r, tc.phi);
        CHECK(got == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("degeneracy guard rejects the boundary") {
    const SurfaceMetric m{LambdaProfile::product()};
    CHECK_THROWS_AS((void)metrics::gaussian_curvature(m, 0.0, 1e-9), DegeneracyError);
    CHECK_THROWS_AS((void)metrics::gaussian_curvature(m, 0.0, kPi - 1e-9), DegeneracyError);
    CHECK_THROWS_AS((void)m.coefficients(0.0, 0.0), DegeneracyError);
    // The smooth profile's tail reaches lambda = 0 exactly at r_end.
    const auto smooth = LambdaProfile::smooth_compliant();
    const SurfaceMetric sm{smooth};
    CHECK_THROWS_AS((void)metrics::gaussian_curvature(sm, smooth.r_domain_max(), 1.0), PoleError);
}

TEST_CASE("ricci diagonal on the product profile is exactly (0,1,1)") {
    const auto d = metrics::ricci_diagonal(LambdaProfile::product(), -1.0);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 1.0);
    CHECK(d[2] == 1.0);
}

TEST_CASE("ricci diagonal of the c1 profile is (2,2,2) on r > 0") {
    for (double r : {kPi / 4.0, 0.2, 0.9, 1.4}) {
        const auto d = metrics::ricci_diagonal(LambdaProfile::c1_cosine(), r);
        CHECK(d[0] == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(d[2] == d[1]);
    }
}

TEST_CASE("ricci nonnegative whenever the profile inequalities hold") {
    const auto p = LambdaProfile::smooth_compliant();
    const auto rep = metrics::validate_profile(p, 1.0, 500);
    REQUIRE(rep.barrier.holds);
    REQUIRE(rep.second_derivative.holds);
    for (int i = 1; i <= 500; ++i) {
        const double r = 1.0 * i / 500.0;
        for (double v : metrics::ricci_diagonal(p, r)) CHECK(v >= 0.0);
    }
    // The flattening tail is analytically (0, (1-a)/lambda, ...); the first
    // entry sits at roundoff of 2/(r_end - r)^2.
    const double r_end = p.r_domain_max();
    for (double d : {0.3, 0.1, 0.03}) {
        const auto v = metrics::ricci_diagonal(p, r_end - d);
        CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::abs(v[0]) <= 1e-9 / (d * d));
        CHECK(v[1] > 0.0);
    }
    CHECK_THROWS_AS((void)metrics::ricci_diagonal(p, r_end), PoleError);
}

}
