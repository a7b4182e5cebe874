#include <annuity/errors.hpp>
#include <annuity/io.hpp>
#include <annuity/random.hpp>
#include <annuity/simulator.hpp>
#include <cmath>
#include <doctest.h>
#include <limits>
#include <sstream>

using namespace annuity;

namespace {

SimulationConfig small(std::size_t paths = 300) {
  SimulationConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = 1.0 / 52;
  cfg.x0 = 1000;
  cfg.threads = 1;
  return cfg;
}

std::string csv(const CohortStats& st) {
  std::ostringstream out;
  write_paths_csv(out, st.paths);
  return out.str();
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("exact lognormal shadow step") {
  const auto dc = derive_constants(base_preset());
  const double r = 0.035, y = 2e-5, dt = 0.01, z = 0.7;
  const double want = y * std::exp((dc.rho - r - 0.5 * dc.theta * dc.theta) * dt - dc.theta * std::sqrt(dt) * z);
  CHECK(step_shadow(dc, r, y, dt, z) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("discounted shadow price is a martingale in expectation") {
  // E[e^{-(rho - r) t} Y_t] = Y_0 under the exact step
  const auto dc = derive_constants(base_preset());
  const NormalStream s(5);
  const int n = 100000;
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += step_shadow(dc, 0.035, 1.0, 1.0, s.normal(static_cast<std::uint64_t>(i), 0));
  acc /= n;
  CHECK(acc * std::exp(-(dc.rho - 0.035)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("config validation") {
  auto cfg = small();
  cfg.dt = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = small();
  cfg.n_paths = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = small();
  cfg.forced_stop = 30;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = small();
  CHECK(cfg.n_steps() == 15 * 52);
}

TEST_CASE("path records are self-consistent") {
  const Policy pol(preset("m3"));
  const auto cfg = small();
  const auto st = run_cohort(pol, cfg);
  REQUIRE(st.paths.size() == cfg.n_paths);
  const double rho = pol.solver().constants().rho, k = 0.095;
  std::size_t censored = 0;
  for (const auto& p : st.paths) {
    CHECK(p.tau >= 0);
    CHECK(p.tau <= cfg.end_time() + 1e-12);
    const double steps = p.tau / cfg.dt;
    CHECK(std::abs(steps - std::round(steps)) < 1e-6);
    CHECK(p.annual_annuity == doctest::Approx(k * p.x_tau));
    CHECK(p.pv_annuity == doctest::Approx(std::exp(-rho * p.tau) * k * p.x_tau / rho));
    CHECK(p.net_wealth == doctest::Approx(p.pv_labor + p.pv_annuity - p.pv_consumption));
    CHECK(annuity_payment_pv(p, rho) == doctest::Approx(rho * p.pv_annuity));
    if (!p.censored) CHECK(p.y_tau <= pol.solution().y_star);
    censored += p.censored;
  }
  CHECK(st.n_censored == censored);
  CHECK(st.probability_within(15) == doctest::Approx(1.0 - static_cast<double>(censored) / cfg.n_paths));
}

TEST_CASE("stopped paths annuitize near the critical wealth") {
  const Policy pol(preset("m1"));
  const auto st = run_cohort(pol, small(200));
  for (const auto& p : st.paths)
    if (!p.censored && p.tau > 0) CHECK(p.x_tau >= pol.solution().x_star * 0.999);
}

TEST_CASE("starting above x* annuitizes at once") {
  const Policy pol(preset("m1"));
  auto cfg = small(10);
  cfg.x0 = 1.2 * pol.solution().x_star;
  for (const auto& p : run_cohort(pol, cfg).paths) {
    CHECK(p.tau == 0);
    CHECK(p.x_tau == cfg.x0);
    CHECK_FALSE(p.censored);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const Policy pol(preset("m2"));
  auto cfg = small(257);
  const auto one = csv(run_cohort(pol, cfg));
  cfg.threads = 4;
  CHECK(csv(run_cohort(pol, cfg)) == one);
  cfg.threads = 3;
  CHECK(csv(run_cohort(pol, cfg)) == one);
  cfg.seed = 43;
  CHECK(csv(run_cohort(pol, cfg)) != one);
}

TEST_CASE("without a forced stop paths run to the horizon") {
  const Policy pol(preset("m1"));
  auto cfg = small(100);
  cfg.forced_stop.reset();
  cfg.horizon = 5;
  for (const auto& p : run_cohort(pol, cfg).paths) CHECK(p.tau <= 5 + 1e-12);
}

TEST_CASE("initial-wealth sweep") {
  const Policy pol(preset("m1"));
  const auto rows = sweep_initial_wealth(pol, small(200), {500, 1000, 1300});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean_tau > rows[1].mean_tau);
  CHECK(rows[1].mean_tau > rows[2].mean_tau);
}

TEST_CASE("type-7 quantiles") {
  const auto s = summarize({4, 1, 3, 2, 5});
  CHECK(s.min == 1);
  CHECK(s.max == 5);
  CHECK(s.p50 == 3);
  CHECK(s.p25 == 2);
  CHECK(s.p05 == doctest::Approx(1.2));
  CHECK(s.p90 == doctest::Approx(4.6));
  CHECK(s.mean == 3);
  CHECK(s.std == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("histogram and linear fit") {
  const auto h = histogram({0.0, 0.5, 1.0, 1.5, 2.0, 2.0}, 0, 2, 2);
  REQUIRE(h.counts.size() == 2);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 4);
  const auto fit = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(fit.slope == doctest::Approx(2));
  CHECK(fit.intercept == doctest::Approx(1));
  CHECK(fit.r2 == doctest::Approx(1));
}

TEST_CASE("parallel_paths touches every index once") {
  std::vector<int> hits(1000, 0);
  parallel_paths(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

}
