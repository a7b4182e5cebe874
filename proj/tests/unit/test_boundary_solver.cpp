#include <annuity/boundary_solver.hpp>
#include <annuity/errors.hpp>
#include <cmath>
#include <doctest.h>
#include <limits>

using namespace annuity;

namespace {

BoundarySolver make(const std::string& name,
                    ThresholdConvention conv = ThresholdConvention::scaled) {
  return BoundarySolver(DualUtility(preset(name), conv));
}

BoundarySolver ruined() {
  auto p = base_preset();
  p.alpha = 1;
  return BoundarySolver(DualUtility(p));
}

}  // namespace

TEST_SUITE("boundary_solver") {

TEST_CASE("critical wealth, canonical thresholds (frozen)") {
  CHECK(make("m1").solve().x_star == doctest::Approx(1409.933056).epsilon(1e-8));
  CHECK(make("m2").solve().x_star == doctest::Approx(1865.578162).epsilon(1e-8));
  CHECK(make("m3").solve().x_star == doctest::Approx(2335.723112).epsilon(1e-8));
}

TEST_CASE("critical wealth, unscaled thresholds against reference levels") {
  using TC = ThresholdConvention;
  CHECK(make("m1", TC::unscaled).solve().x_star == doctest::Approx(1409.93).epsilon(5e-6));
  CHECK(make("m2", TC::unscaled).solve().x_star == doctest::Approx(1613.22).epsilon(5e-6));
  CHECK(make("m3", TC::unscaled).solve().x_star == doctest::Approx(1855.29).epsilon(5e-6));
}

TEST_CASE("no-labor boundary: closed form agrees with the root") {
  const auto s = make("m1");
  const auto sol = s.solve();
  CHECK(sol.y_star == doctest::Approx(1.176703093e-5).epsilon(1e-9));
  CHECK(sol.c_coef == doctest::Approx(-9.387774141505052e-06).epsilon(1e-9));
  CHECK(std::abs(s.closed_form_y_star_no_labor() / sol.y_star - 1) < 1e-12);
  CHECK_THROWS_AS(make("m3").closed_form_y_star_no_labor(), PreconditionError);
}

TEST_CASE("free boundary lies below the zero of the combined conjugate") {
  for (const char* name : {"m1", "m2", "m3"}) {
    const auto s = make(name);
    const auto sol = s.solve();
    CHECK(sol.y_star < sol.y0);
    CHECK(std::abs(s.ubar_combined(sol.y0)) < 1e-12 * std::abs(s.ubar_combined(sol.y0 / 2)));
    CHECK(std::abs(s.F(sol.y_star)) < 1e-10 * std::abs(s.F(sol.y_star / 2)));
    CHECK(sol.x_star ==
          doctest::Approx(s.utility().inv_marginal_wealth(s.constants().rho * sol.y_star))
              .epsilon(1e-14));
  }
}

TEST_CASE("value matching and smooth pasting at y*") {
  for (const char* name : {"m1", "m2", "m3"}) {
    const auto s = make(name);
    const auto sol = s.solve();
    const double y = sol.y_star;
    CHECK(s.phi_continuation(y, sol) == doctest::Approx(s.obstacle(y)).epsilon(1e-11));
    CHECK(s.phi_continuation_prime(y, sol) == doctest::Approx(s.obstacle_prime(y)).epsilon(1e-10));
  }
}

TEST_CASE("phi solves the dual ODE on the continuation region (finite differences)") {
  const auto s = make("m3");
  const auto sol = s.solve();
  const auto& dc = s.constants();
  const double r = s.params().r;
  for (double ratio : {1.5, 3.0, 10.0, 100.0}) {
    const double y = sol.y_star * ratio;
    if (std::abs(y / dc.y_tilde - 1) < 0.01 || std::abs(y / dc.y_bar - 1) < 0.01) continue;
    const double h = y * 1e-4;
    const double f0 = s.phi(y, sol), fp = s.phi(y + h, sol), fm = s.phi(y - h, sol);
    const double d1 = (fp - fm) / (2 * h), d2 = (fp - 2 * f0 + fm) / (h * h);
    const double res = -dc.rho * f0 + (dc.rho - r) * y * d1 + 0.5 * dc.theta * dc.theta * y * y * d2 +
                       s.utility().ubar1(y);
    CHECK(std::abs(res) < 1e-5 * std::abs(s.utility().ubar1(y)));
  }
}

TEST_CASE("phi equals the obstacle below y*") {
  const auto s = make("m2");
  const auto sol = s.solve();
  for (double ratio : {0.1, 0.5, 0.99}) {
    const double y = sol.y_star * ratio;
    CHECK(s.phi(y, sol) == s.obstacle(y));
    CHECK(s.phi_prime(y, sol) == s.obstacle_prime(y));
  }
}

TEST_CASE("wealth map is decreasing and inverts") {
  for (const char* name : {"m1", "m3"}) {
    const auto s = make(name);
    const auto sol = s.solve();
    double prev = s.wealth_of_shadow(sol.y_star, sol);
    CHECK(prev == doctest::Approx(sol.x_star).epsilon(1e-9));
    for (double ratio = 1.1; ratio < 1e6; ratio *= 1.9) {
      const double x = s.wealth_of_shadow(sol.y_star * ratio, sol);
      CHECK(x < prev);
      prev = x;
    }
    for (double x : {10.0, 250.0, 1000.0, 0.99 * sol.x_star}) {
      const double y = s.shadow_of_wealth(x, sol);
      CHECK(s.wealth_of_shadow(y, sol) == doctest::Approx(x).epsilon(1e-10));
    }
  }
}

TEST_CASE("wealth map domain errors") {
  const auto s = make("m1");
  const auto sol = s.solve();
  CHECK_THROWS_AS(s.shadow_of_wealth(-5, sol), DomainError);
  CHECK_THROWS_AS(s.shadow_of_wealth(sol.x_star * 1.01, sol), OutOfRangeError);
  CHECK_THROWS_AS(s.wealth_of_shadow(sol.y_star * 0.5, sol), OutOfRangeError);
  CHECK_THROWS_AS(s.wealth_of_shadow(sol.y_star * 2e9, sol), OutOfRangeError);
}

TEST_CASE("closed-form integrals against hand-integrated powers") {
  // m1: Ubar1 = A y^{p1'} - w y on the whole axis
  const auto s = make("m1");
  const auto& dc = s.constants();
  const double a = 2e-6, b = 7e-5, n = dc.n2;
  auto prim = [&](double z) {
    return -dc.A_tilde * std::pow(z, dc.p1p - n) / (dc.p1p - n) +
           s.params().w * std::pow(z, 1 - n) / (1 - n);
  };
  CHECK(s.definite_integral(a, b, n) == doctest::Approx(prim(b) - prim(a)).epsilon(1e-13));
  CHECK(s.definite_integral(b, a, n) == doctest::Approx(prim(a) - prim(b)).epsilon(1e-13));
  CHECK_THROWS_AS(s.definite_integral(1e-6, std::numeric_limits<double>::infinity(), dc.n2),
                  DivergenceError);
  CHECK_THROWS_AS(s.definite_integral(0, 1e-6, dc.n1), DivergenceError);
}

TEST_CASE("ruined regime has no boundary") {
  const auto s = ruined();
  CHECK(s.regime() == Regime::Ruined);
  CHECK_THROWS_AS(s.solve_free_boundary(), RegimeError);
  CHECK_THROWS_AS(s.F(1e-6), RegimeError);
  const auto sol = s.solve();
  CHECK(sol.regime == Regime::Ruined);
  CHECK(std::isinf(sol.x_star));
  // wealth map still defined and decreasing
  const double x1 = s.wealth_of_shadow(1e-7, sol), x2 = s.wealth_of_shadow(1e-6, sol);
  CHECK(x1 > x2);
  CHECK(s.shadow_of_wealth(x1, sol) == doctest::Approx(1e-7).epsilon(1e-9));
}

TEST_CASE("full labor cap solves") {
  auto p = base_preset();
  p.b_max = 1;
  const BoundarySolver s{DualUtility(p)};
  const auto sol = s.solve();
  CHECK(sol.x_star > make("m1").solve().x_star * 1.3);
}

}
