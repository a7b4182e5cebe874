#pragma once

#include <functional>
#include <string>
#include <vector>

#include "annuity/simulator.hpp"

namespace annuity {

struct Integrand {
  std::function<double(double)> f;
  std::vector<double> breakpoints;  // kinks or seams; the integral is split there
};

// Finite pieces are cut at the breakpoints and into factor-of-2 spans, then
// integrated with both 61-point Gauss-Kronrod and tanh-sinh; the two must agree
// to 1e-10 of the L1 norm. An infinite upper limit is mapped by u = 1/z and
// handled by tanh-sinh alone, which tolerates the endpoint singularity.
// Throws ConvergenceError when the rules disagree or the estimate misses.
double quad_integral(const Integrand& integrand, double a, double b);

struct CheckResult {
  std::string check;
  double max_residual = 0;
  double tolerance = 0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  void add(std::string check, double max_residual, double tolerance);
  void add(std::string check, double max_residual, double tolerance, bool passed);
  void append(const VerificationReport& other);
};

struct Estimate {
  double mean = 0;
  double std_error = 0;
};

// Log-spaced grid of n points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

VerificationReport check_quadrature(const BoundarySolver& solver, const DualSolution& sol,
                                    std::size_t points = 20, std::uint64_t seed = 7);
VerificationReport check_variational_inequality(const BoundarySolver& solver,
                                                const DualSolution& sol,
                                                const std::vector<double>& grid);
VerificationReport check_variational_inequality(const BoundarySolver& solver,
                                                const DualSolution& sol);
VerificationReport check_smooth_pasting(const BoundarySolver& solver, const DualSolution& sol);
VerificationReport check_derivatives(const BoundarySolver& solver, const DualSolution& sol);
VerificationReport check_convexity(const BoundarySolver& solver, const DualSolution& sol);

// Mean and standard error of per-path budget sums; the target is x0 + w/r.
Estimate estimate_budget(const Policy& policy, const SimulationConfig& cfg);
VerificationReport check_budget_constraint(const Policy& policy, const SimulationConfig& cfg);

// Expected discounted utility of the optimal strategy started at cfg.x0.
Estimate estimate_primal_value(const Policy& policy, const SimulationConfig& cfg);
VerificationReport check_duality_gap(const Policy& policy, const SimulationConfig& cfg);

// Same objective for a suboptimal strategy: labor pinned at `labor` while
// consumption and the risky position follow the optimal feedback maps of
// current wealth. Wealth is stepped with Euler increments driven by the
// simulator's normal stream.
Estimate estimate_constant_labor_value(const Policy& policy, const SimulationConfig& cfg,
                                       double labor);

struct VerifyOptions {
  std::size_t grid_points = 2000;
  bool monte_carlo = true;
  SimulationConfig mc{10000, 1.0 / 252, 20.0, std::nullopt, 42, 1000.0, 0};
};

// Every check that applies to the solution's regime.
VerificationReport run_all(const Policy& policy, const VerifyOptions& options = {});

}  // namespace annuity
