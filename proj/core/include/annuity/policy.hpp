#pragma once

#include "annuity/boundary_solver.hpp"

namespace annuity {

struct PolicyPoint {
  double y = 0;        // shadow price, V'(x)
  double x = 0;
  double c_star = 0;   // consumption rate; the annuity payment k x once stopped
  double b_star = 0;   // labor rate
  double pi_star = 0;  // amount held in the risky asset
  double value = 0;
  bool stopped = false;
};

// Value function and optimal controls for a solved problem.
class Policy {
 public:
  Policy(BoundarySolver solver, DualSolution sol);
  // Solves the dual problem for the given parameters.
  explicit Policy(const ModelParams& params,
                  ThresholdConvention convention = ThresholdConvention::scaled);

  const BoundarySolver& solver() const { return solver_; }
  const DualSolution& solution() const { return sol_; }
  const DualUtility& utility() const { return solver_.utility(); }

  double value_function(double x) const;
  // (v2/rho) U2(k x)
  double stopped_value(double x) const;

  double optimal_consumption(double y) const;
  double optimal_labor(double y) const;
  // (θ/σ) y phi''(y), written out term by term
  double optimal_portfolio(double y) const;

  PolicyPoint policy_at_wealth(double x) const;

 private:
  BoundarySolver solver_;
  DualSolution sol_;
};

}  // namespace annuity
