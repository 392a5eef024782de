#include <doctest.h>

#include <cmath>

#include "geolab/metrics.hpp"
#include "oracles.hpp"

using namespace geolab;
using metrics::DerivSide;
using metrics::LambdaProfile;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("profile") {

TEST_CASE("product profile is identically one") {
    const auto p = LambdaProfile::product();
    const auto e = p.eval(3.7);
    CHECK(e.lambda == 1.0);
    CHECK(e.dlambda == 0.0);
    CHECK(e.ddlambda == 0.0);
}

TEST_CASE("c1 cosine values at pi/4") {
    const auto p = LambdaProfile::c1_cosine();
    const auto e = p.eval(kPi / 4.0);
    CHECK(e.lambda == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.dlambda == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(e.ddlambda) < 1e-15);
}

TEST_CASE("c1 cosine one-sided second derivative at the kink") {
    const auto p = LambdaProfile::c1_cosine();
    CHECK(p.eval(0.0, DerivSide::Below).ddlambda == 0.0);
    CHECK(p.eval(0.0, DerivSide::Above).ddlambda == doctest::Approx(-2.0));
    CHECK(p.eval(0.0, DerivSide::Below).lambda == 1.0);
    CHECK(p.eval(0.0, DerivSide::Above).lambda == 1.0);
}

TEST_CASE("reflected profile mirrors the inner one") {
    const auto p = LambdaProfile::reflected(0.1, LambdaProfile::c1_cosine());
    const double r = -0.1 - kPi / 4.0;
    const auto e = p.eval(r);
    CHECK(e.lambda == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.dlambda == doctest::Approx(+1.0).epsilon(1e-15));
    CHECK(std::abs(e.ddlambda) < 1e-15);

    // Reflection symmetry and odd slope about r = -eps/2: bit-exact where
    // -eps - r is exactly representable, within an ulp otherwise.
    const auto pd = LambdaProfile::reflected(0.25, LambdaProfile::c1_cosine());
    for (double rr : {0.25, 0.5, 0.75, 1.0}) {
        CHECK(pd.eval(rr).lambda == pd.eval(-0.25 - rr).lambda);
        CHECK(pd.eval(rr).dlambda == -pd.eval(-0.25 - rr).dlambda);
    }
    for (double rr : {-0.55, -0.3, -0.11, -0.05, 0.2, 0.7}) {
        CHECK(p.eval(rr).lambda == doctest::Approx(p.eval(-0.1 - rr).lambda).epsilon(1e-15));
        CHECK(p.eval(rr).dlambda == doctest::Approx(-p.eval(-0.1 - rr).dlambda).epsilon(1e-14));
    }
    CHECK(p.lambda(-0.05) == 1.0);
}

TEST_CASE("derivatives agree with finite differences away from kinks") {
    const auto smooth = LambdaProfile::smooth_compliant();
    const auto c1 = LambdaProfile::c1_cosine();
    const auto refl = LambdaProfile::reflected(0.2, LambdaProfile::smooth_compliant());
    struct Case {
        const LambdaProfile* p;
        double r;
    };
    const Case cases[] = {{&smooth, 0.1},  {&smooth, 0.3}, {&smooth, 0.8}, {&c1, 0.4},
                          {&c1, 1.2},      {&refl, 0.5},   {&refl, -0.45}, {&refl, -0.9}};
    for (const auto& tc : cases) {
        auto lam = [&](double r) { return tc.p->lambda(r); };
        const auto e = tc.p->eval(tc.r);
        CHECK(e.dlambda == doctest::Approx(oracles::fd_derivative(lam, tc.r)).epsilon(1e-7));
        CHECK(e.ddlambda == doctest::Approx(oracles::fd_second(lam, tc.r)).epsilon(1e-4));
    }
}

TEST_CASE("smooth tail reaches zero with zero slope and lambda'^2/lambda -> 2 lambda''") {
    const auto p = LambdaProfile::smooth_compliant();
    const double r_end = p.r_domain_max();
    const auto at_end = p.eval(r_end);
    CHECK(at_end.lambda == doctest::Approx(0.0));
    CHECK(at_end.dlambda == doctest::Approx(0.0));
    // Quadratic tail: lambda'^2/lambda equals 2 lambda'' identically.
    for (double d : {1e-1, 1e-2, 1e-3}) {
        const auto e = p.eval(r_end - d);
        CHECK(e.dlambda * e.dlambda / e.lambda ==
              doctest::Approx(2.0 * e.ddlambda).epsilon(1e-12));
        CHECK(std::abs(e.dlambda * e.dlambda / e.lambda - 2.0 * e.ddlambda) < 1e-3);
    }
    CHECK_THROWS_AS((void)p.eval(r_end + 0.01), DomainError);
}

TEST_CASE("c1 profile rejects r beyond pi/2") {
    const auto p = LambdaProfile::c1_cosine();
    CHECK_THROWS_AS((void)p.eval(kPi / 2.0 + 0.01), DomainError);
    CHECK(p.eval(kPi / 2.0).lambda == doctest::Approx(0.0));
}

TEST_CASE("validate_profile: c1 saturates the barrier") {
    const auto rep = metrics::validate_profile(LambdaProfile::c1_cosine(), 1.0, 1000);
    CHECK(rep.barrier.holds);
    CHECK(rep.barrier_saturated);
    CHECK(rep.barrier.worst_margin == 0.0);
    CHECK(rep.second_derivative.holds);
    CHECK(rep.zero_slope_at_zero.holds);
}

TEST_CASE("validate_profile: product violates the barrier everywhere") {
    const auto rep = metrics::validate_profile(LambdaProfile::product(), 1.0, 1000);
    CHECK_FALSE(rep.barrier.holds);
    CHECK(rep.barrier.worst_margin > 0.9); // sin 2r peaks at 1
}

TEST_CASE("validate_profile: smooth default holds all three constraints") {
    const auto rep = metrics::validate_profile(LambdaProfile::smooth_compliant(), 1.0, 1000);
    CHECK(rep.barrier.holds);
    CHECK_FALSE(rep.barrier_saturated);
    CHECK(rep.second_derivative.holds);
    CHECK(rep.second_derivative.worst_margin < 0.0);
    CHECK(rep.zero_slope_at_zero.holds);

    // The strict margin is representable away from the flat contact; below
    // r ~ 4e-3 the bump drops under the ulp of sin 2r and the margin reads 0.
    const auto p = LambdaProfile::smooth_compliant();
    for (int i = 1; i <= 100; ++i) {
        const double r = 0.01 + 0.99 * i / 100.0;
        CHECK(p.eval(r).dlambda + std::sin(2.0 * r) < 0.0);
    }
}

TEST_CASE("validate_profile: negative eta violates the barrier") {
    const auto rep =
        metrics::validate_profile(LambdaProfile::smooth_compliant({-0.05, 1.0}), 1.0, 1000);
    CHECK_FALSE(rep.barrier.holds);
    CHECK(rep.barrier.worst_margin > 0.0);
}

TEST_CASE("profile json round-trip") {
    const auto cases = {
        LambdaProfile::product(),
        LambdaProfile::c1_cosine(),
        LambdaProfile::smooth_compliant({0.07, 0.9}),
        LambdaProfile::reflected(0.25, LambdaProfile::smooth_compliant()),
    };
    for (const auto& p : cases) {
        const auto q = LambdaProfile::from_json(p.to_json());
        CHECK(q.kind() == p.kind());
        for (double r : {-0.4, -0.1, 0.0, 0.2, 0.6}) {
            if (r < q.r_domain_min() || r > q.r_domain_max()) continue;
            CHECK(q.lambda(r) == p.lambda(r));
            CHECK(q.dlambda(r) == p.dlambda(r));
        }
    }
    CHECK_THROWS_AS((void)LambdaProfile::from_json(nlohmann::json{{"kind", "nope"}}), DomainError);
}

}
