#include <annuity/errors.hpp>
#include <annuity/policy.hpp>
#include <cmath>
#include <doctest.h>
#include <limits>

using namespace annuity;

TEST_SUITE("policy") {

TEST_CASE("value at x0 = 1000 (frozen)") {
  CHECK(Policy(preset("m1")).value_function(1000) == doctest::Approx(-0.022436316).epsilon(1e-7));
  CHECK(Policy(preset("m2")).value_function(1000) == doctest::Approx(-0.019974814).epsilon(1e-7));
  CHECK(Policy(preset("m3")).value_function(1000) == doctest::Approx(-0.017390165).epsilon(1e-7));
}

TEST_CASE("value function is increasing and concave across x*") {
  for (const char* name : {"m1", "m2", "m3"}) {
    const Policy pol(preset(name));
    const double xs = pol.solution().x_star;
    std::vector<double> v;
    for (double x = 50; x < 2 * xs; x += xs / 40) v.push_back(pol.value_function(x));
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
    for (std::size_t i = 2; i < v.size(); ++i)
      CHECK(v[i] - v[i - 1] <= (v[i - 1] - v[i - 2]) * (1 + 1e-9));
  }
}

TEST_CASE("value matches the stopped value at x* and beyond") {
  const Policy pol(preset("m3"));
  const auto& p = pol.solver().params();
  const double xs = pol.solution().x_star;
  CHECK(pol.value_function(xs * (1 - 1e-10)) == doctest::Approx(pol.stopped_value(xs)).epsilon(1e-8));
  const double x = 2 * xs;
  const double rho = pol.solver().constants().rho;
  CHECK(pol.value_function(x) ==
        doctest::Approx(p.v2 / rho * std::pow(p.k * x, 1 - p.p2) / (1 - p.p2)).epsilon(1e-14));
}

TEST_CASE("shadow price is the marginal value") {
  const Policy pol(preset("m2"));
  for (double x : {200.0, 800.0, 1500.0}) {
    const double h = 1e-3;
    const double dv = (pol.value_function(x + h) - pol.value_function(x - h)) / (2 * h);
    CHECK(pol.policy_at_wealth(x).y == doctest::Approx(dv).epsilon(1e-6));
  }
}

TEST_CASE("portfolio equals (theta/sigma) y phi''") {
  for (const char* name : {"m1", "m2", "m3"}) {
    const Policy pol(preset(name));
    const auto& s = pol.solver();
    const auto& sol = pol.solution();
    const double ts = s.constants().theta / s.params().sigma;
    for (double ratio : {1.01, 2.0, 30.0, 1e4}) {
      const double y = sol.y_star * ratio;
      CHECK(pol.optimal_portfolio(y) == doctest::Approx(ts * y * s.phi_second(y, sol)).epsilon(1e-9));
    }
  }
}

TEST_CASE("controls at a wealth level") {
  const Policy pol(preset("m3"));
  const auto pt = pol.policy_at_wealth(1000);
  CHECK_FALSE(pt.stopped);
  CHECK(pt.c_star > 0);
  CHECK(pt.b_star >= 0);
  CHECK(pt.b_star <= 0.5);
  CHECK(pt.pi_star > 0);
  CHECK(pt.value == doctest::Approx(pol.value_function(1000)));
  CHECK(pt.c_star == doctest::Approx(pol.optimal_consumption(pt.y)));
  CHECK(pt.b_star == doctest::Approx(pol.optimal_labor(pt.y)));

  const double xs = pol.solution().x_star;
  const auto stop = pol.policy_at_wealth(1.5 * xs);
  CHECK(stop.stopped);
  CHECK(stop.c_star == doctest::Approx(0.095 * 1.5 * xs));
  CHECK(stop.pi_star == 0);
  CHECK(stop.b_star == 0);
}

TEST_CASE("more wealth means less labor") {
  const Policy pol(preset("m3"));
  double prev = 1;
  for (double x = 20; x < pol.solution().x_star; x += 40) {
    const double b = pol.policy_at_wealth(x).b_star;
    CHECK(b <= prev + 1e-12);
    prev = b;
  }
}

TEST_CASE("ruined regime exposes value and controls") {
  auto p = base_preset();
  p.alpha = 1;
  const Policy pol(p);
  CHECK(pol.solution().regime == Regime::Ruined);
  double prev = -std::numeric_limits<double>::infinity();
  for (double x = 100; x < 5000; x += 100) {
    const auto pt = pol.policy_at_wealth(x);
    CHECK(std::isfinite(pt.value));
    CHECK(pt.value > prev);
    CHECK_FALSE(pt.stopped);
    prev = pt.value;
  }
}

}
