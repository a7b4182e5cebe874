#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "annuity/policy.hpp"

namespace annuity {

struct SimulationConfig {
  std::size_t n_paths = 1000;
  double dt = 1.0 / 252;
  double horizon = 20;
  // Paths still running at this time annuitize there and are flagged censored.
  // Without it they run to the horizon.
  std::optional<double> forced_stop = 15.0;
  std::uint64_t seed = 42;
  double x0 = 1000;
  unsigned threads = 0;  // 0: hardware concurrency; results do not depend on it

  double end_time() const { return forced_stop.value_or(horizon); }
  std::size_t n_steps() const;
};

void validate(const SimulationConfig& cfg);

struct PathRecord {
  std::size_t path = 0;
  double tau = 0;  // stopping time; the end time when censored
  bool censored = false;
  double x_tau = 0;
  double annual_annuity = 0;  // k x_tau
  double avg_consumption = 0;
  double avg_labor_income = 0;
  double pv_annuity = 0;      // e^{-rho tau} k x_tau / rho
  double pv_consumption = 0;
  double pv_labor = 0;
  double net_wealth = 0;      // pv_labor + pv_annuity - pv_consumption
  double y_tau = 0;
};

// Present value of one year's annuity payment, e^{-rho tau} k x_tau.
double annuity_payment_pv(const PathRecord& rec, double rho);

// Monte-Carlo estimators carried along a path for the verification module.
struct PathDiagnostics {
  // ∫ H (c + w l) dt + H_tau (x_tau + w/r), H the state-price deflator
  double budget = 0;
  // v1 ∫ e^{-rho t} U1 dt + e^{-rho tau} (v2/rho) U2(k x_tau); censored paths
  // add e^{-rho T} V(x_T)
  double primal = 0;
};

// Averages over paths still running at whole-year marks.
struct YearProfile {
  double t = 0;
  std::size_t active = 0;
  double consumption = 0;
  double labor_income = 0;
  double portfolio = 0;
};

struct Summary {
  double min = 0, p05 = 0, p25 = 0, p50 = 0, p75 = 0, p90 = 0, max = 0;
  double mean = 0, std = 0;
};

// Linear-interpolation quantiles (the common "type 7" definition) and the
// sample standard deviation.
Summary summarize(std::vector<double> values);

struct CohortStats {
  std::vector<PathRecord> paths;
  std::size_t n_censored = 0;
  double mean_tau = 0;
  // (N, P(tau <= N)) for whole years N up to the end time
  std::vector<std::pair<double, double>> prob_within;
  Summary labor_income;
  Summary consumption;
  Summary annuity;     // k x_tau
  Summary annuity_pv;  // e^{-rho tau} k x_tau
  Summary net_wealth;
  Summary tau;
  std::vector<YearProfile> profile;

  double probability_within(double years) const;
};

// y exp((rho - r - ½θ²) dt - θ sqrt(dt) z)
double step_shadow(const DerivedConstants& dc, double r, double y, double dt, double z);

PathRecord simulate_path(const Policy& policy, const SimulationConfig& cfg, std::size_t path_index);
PathRecord simulate_path(const Policy& policy, const SimulationConfig& cfg, std::size_t path_index,
                         PathDiagnostics& diagnostics);

CohortStats run_cohort(const Policy& policy, const SimulationConfig& cfg);

// Runs f(i) for i in [0, n) on cfg.threads workers; f must only write slot i.
void parallel_paths(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

struct WealthSweepRow {
  double x0 = 0;
  double mean_tau = 0;
  double mean_consumption = 0;
  double mean_labor_income = 0;
  double prob_censored = 0;
};

std::vector<WealthSweepRow> sweep_initial_wealth(const Policy& policy, SimulationConfig cfg,
                                                 const std::vector<double>& x0_list);

struct Histogram {
  double lo = 0, hi = 0;
  std::vector<std::size_t> counts;
};
Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins);

// Least-squares line through (x, y) with its coefficient of determination.
struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace annuity
