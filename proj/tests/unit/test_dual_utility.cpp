#include <annuity/dual_utility.hpp>
#include <annuity/errors.hpp>
#include <cmath>
#include <doctest.h>
#include <limits>
#include <random>

#include "oracles.hpp"

using namespace annuity;

namespace {

std::vector<ModelParams> labor_models() {
  std::vector<ModelParams> out{preset("m1"), preset("m2"), preset("m3")};
  auto full = base_preset();
  full.b_max = 1;
  out.push_back(full);
  auto lopsided = base_preset();
  lopsided.alpha = 1.0 / 3;
  lopsided.beta = 2;
  lopsided.p1 = 3.5;
  out.push_back(lopsided);
  return out;
}

}  // namespace

TEST_SUITE("dual_utility") {

TEST_CASE("running conjugate matches a brute-force supremum") {
  for (const auto& p : labor_models()) {
    const DualUtility u(p);
    const auto& dc = u.constants();
    const double mid = std::isfinite(dc.y_bar) ? std::sqrt(dc.y_tilde * dc.y_bar) : dc.y_tilde;
    for (double y : {dc.y_tilde * 0.05, dc.y_tilde * 0.7, dc.y_tilde, mid, dc.y_tilde * 1.3,
                     std::isfinite(dc.y_bar) ? dc.y_bar * 2 : dc.y_tilde * 40}) {
      const double brute =
          oracle::conjugate_running(y, p.alpha, p.beta, p.p1, p.w, p.v1, 1 - p.b_max);
      CHECK(u.ubar1(y) == doctest::Approx(brute).epsilon(1e-9));
    }
  }
}

TEST_CASE("terminal conjugate matches a brute-force supremum") {
  const DualUtility u(base_preset());
  for (double y : {1e-6, 1e-4, 1e-2, 0.3})
    CHECK(u.ubar2(y) == doctest::Approx(oracle::conjugate_terminal(y, 0.095, 2, 0.1)).epsilon(1e-10));
}

TEST_CASE("Fenchel inequality on random triples") {
  const auto p = base_preset();
  const DualUtility u(p);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> lc(std::log(1.0), std::log(1e4)), ll(0.5, 1.0),
      ly(std::log(1e-9), std::log(1e-3));
  for (int i = 0; i < 5000; ++i) {
    const double c = std::exp(lc(gen)), l = ll(gen), y = std::exp(ly(gen));
    const double primal = p.v1 * u.u1(c, l) - (c + p.w * l) * y;
    CHECK(u.ubar1(y) >= primal - 1e-12 * std::abs(primal));
  }
}

TEST_CASE("continuity at both seams") {
  for (const auto& p : labor_models()) {
    const DualUtility u(p);
    const auto& dc = u.constants();
    for (double seam : {dc.y_tilde, dc.y_bar}) {
      if (!std::isfinite(seam) || p.b_max == 0) continue;
      const double below = seam * (1 - 1e-13), above = seam * (1 + 1e-13);
      CHECK(u.ubar1(below) == doctest::Approx(u.ubar1(above)).epsilon(1e-11));
      CHECK(u.ubar1_prime(below) == doctest::Approx(u.ubar1_prime(above)).epsilon(1e-11));
    }
  }
}

TEST_CASE("envelope identity: Ubar1' = -(c + w l)") {
  for (const auto& p : labor_models()) {
    const DualUtility u(p);
    for (double y : {1e-8, 1e-7, 1e-6, 3e-6, 1e-5, 1e-4}) {
      const double spend = u.inv_marginal_consumption(y) + p.w * u.inv_marginal_leisure(y);
      CHECK(u.ubar1_prime(y) == doctest::Approx(-spend).epsilon(1e-12));
    }
  }
}

TEST_CASE("inverse marginals by region") {
  const auto p = base_preset();
  const DualUtility u(p);
  const auto& dc = u.constants();
  CHECK(u.region(dc.y_tilde / 2) == 1);
  CHECK(u.inv_marginal_leisure(dc.y_tilde / 2) == 1.0);
  CHECK(u.region(std::sqrt(dc.y_tilde * dc.y_bar)) == 2);
  const double l = u.inv_marginal_leisure(std::sqrt(dc.y_tilde * dc.y_bar));
  CHECK(l > 0.5);
  CHECK(l < 1.0);
  CHECK(u.region(dc.y_bar * 3) == 3);
  CHECK(u.inv_marginal_leisure(dc.y_bar * 3) == 0.5);
  // first-order condition for consumption: v1 dU1/dc = y
  const double y = std::sqrt(dc.y_tilde * dc.y_bar);
  const double c = u.inv_marginal_consumption(y);
  const double h = c * 1e-6;
  const double du = (u.u1(c + h, l) - u.u1(c - h, l)) / (2 * h);
  CHECK(p.v1 * du == doctest::Approx(y).epsilon(1e-7));
}

TEST_CASE("terminal inverse marginal") {
  const auto p = base_preset();
  const DualUtility u(p);
  for (double y : {1e-5, 1e-3}) {
    const double x = u.inv_marginal_wealth(y);
    // v2 k (k x)^{-p2} = y
    CHECK(p.v2 * p.k * std::pow(p.k * x, -p.p2) == doctest::Approx(y).epsilon(1e-13));
    CHECK(u.ubar2_prime(y) == doctest::Approx(-x).epsilon(1e-13));
  }
}

TEST_CASE("conjugates are convex and decreasing") {
  for (const auto& p : labor_models()) {
    const DualUtility u(p);
    double prev = u.ubar1_prime(1e-10);
    for (double y = 1e-10; y < 1e-2; y *= 1.07) {
      const double d = u.ubar1_prime(y);
      CHECK(d < 0);
      CHECK(d >= prev - 1e-12 * std::abs(prev));
      prev = d;
    }
  }
}

TEST_CASE("direct utilities reject points outside their domains") {
  const DualUtility u(base_preset());
  CHECK_THROWS_AS(u.u1(0, 1), DomainError);
  CHECK_THROWS_AS(u.u1(1, 0), DomainError);
  CHECK_THROWS_AS(u.u2(-1), DomainError);
}

TEST_CASE("unscaled convention reproduces the unleveraged seams") {
  const auto p = base_preset();
  const DualUtility u(p, ThresholdConvention::unscaled);
  CHECK(u.constants().y_tilde == u.constants().y_tilde0);
  // the unscaled convention is not a conjugate: Ubar1 jumps at y_tilde
  const double seam = u.constants().y_tilde;
  CHECK(std::abs(u.ubar1(seam * (1 - 1e-12)) - u.ubar1(seam * (1 + 1e-12))) >
        1e-6 * std::abs(u.ubar1(seam)));
}

}
