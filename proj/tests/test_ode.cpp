#include <doctest.h>

#include <cmath>

#include "geolab/ode.hpp"

using namespace geolab;

TEST_SUITE("ode") {

TEST_CASE("exponential growth with dense output") {
    auto rhs = [](double, const ode::Vec<1>& y) -> ode::Vec<1> { return {y[0]}; };
    ode::Options opt;
    opt.rtol = opt.atol = 1e-12;
    std::vector<ode::DenseStep<1>> steps;
    ode::Vec<1> y_final{};
    ode::integrate<1>(rhs, {1.0}, 0.0, 2.0, opt,
                      [&](const ode::DenseStep<1>& s, const ode::Vec<1>& y,
                          const ode::Vec<1>&) {
                          steps.push_back(s);
                          y_final = y;
                          return ode::StepControl::Continue;
                      });
    CHECK(y_final[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-11));
    for (const auto& s : steps) {
        for (int k = 0; k <= 4; ++k) {
            const double t = s.t0 + s.h * k / 4.0;
            CHECK(s.eval(t)[0] == doctest::Approx(std::exp(t)).epsilon(1e-9));
        }
    }
}

TEST_CASE("harmonic oscillator backward in time") {
    auto rhs = [](double, const ode::Vec<2>& y) -> ode::Vec<2> { return {y[1], -y[0]}; };
    ode::Options opt;
    opt.rtol = opt.atol = 1e-12;
    ode::Vec<2> y_final{};
    ode::integrate<2>(rhs, {0.0, 1.0}, 0.0, -3.0, opt,
                      [&](const ode::DenseStep<2>&, const ode::Vec<2>& y, const ode::Vec<2>&) {
                          y_final = y;
                          return ode::StepControl::Continue;
                      });
    CHECK(y_final[0] == doctest::Approx(std::sin(-3.0)).epsilon(1e-10));
    CHECK(y_final[1] == doctest::Approx(std::cos(-3.0)).epsilon(1e-10));
}

TEST_CASE("checkpoints are landed on exactly") {
    auto rhs = [](double, const ode::Vec<1>& y) -> ode::Vec<1> { return {y[0]}; };
    const std::vector<double> cps = {0.3141592653589793, 1.0, 1.5};
    ode::Options opt;
    opt.checkpoints = &cps;
    std::vector<double> ends;
    ode::integrate<1>(rhs, {1.0}, 0.0, 2.0, opt,
                      [&](const ode::DenseStep<1>& s, const ode::Vec<1>&, const ode::Vec<1>&) {
                          ends.push_back(s.t0 + s.h);
                          return ode::StepControl::Continue;
                      });
    for (double cp : cps) {
        bool hit = false;
        for (double e : ends) {
            if (std::abs(e - cp) < 1e-13) hit = true;
        }
        CHECK(hit);
    }
}

TEST_CASE("rhs exceptions trigger retries, not failure, when events stop first") {
    // Integrand valid only for y < 2; we stop the integration at y = 1.5.
    auto rhs = [](double, const ode::Vec<1>& y) -> ode::Vec<1> {
        if (y[0] >= 2.0) throw DomainError("out of range");
        return {1.0};
    };
    ode::Options opt;
    double reached = 0.0;
    ode::integrate<1>(rhs, {0.0}, 0.0, 10.0, opt,
                      [&](const ode::DenseStep<1>&, const ode::Vec<1>& y, const ode::Vec<1>&) {
                          reached = y[0];
                          return y[0] > 1.5 ? ode::StepControl::Stop : ode::StepControl::Continue;
                      });
    CHECK(reached > 1.5);
    CHECK(reached < 2.0);
}

TEST_CASE("dense bisection locates a crossing") {
    auto rhs = [](double, const ode::Vec<2>& y) -> ode::Vec<2> { return {y[1], -y[0]}; };
    ode::Options opt;
    opt.rtol = opt.atol = 1e-13;
    double root = -1.0;
    ode::integrate<2>(rhs, {1.0, 0.0}, 0.0, 4.0, opt,
                      [&](const ode::DenseStep<2>& s, const ode::Vec<2>&, const ode::Vec<2>&) {
                          const double g0 = s.eval(s.t0)[0];
                          const double g1 = s.eval(s.t0 + s.h)[0];
                          if (g0 * g1 < 0.0) {
                              root = ode::bisect_dense(
                                  s, [](const ode::Vec<2>& y) { return y[0]; }, s.t0, s.t0 + s.h,
                                  g0, 1e-13);
                              return ode::StepControl::Stop;
                          }
                          return ode::StepControl::Continue;
                      });
    CHECK(root == doctest::Approx(1.5707963267948966).epsilon(1e-12));
}

}
