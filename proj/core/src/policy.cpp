#include "annuity/policy.hpp"

#include <cmath>

#include "annuity/errors.hpp"

namespace annuity {

Policy::Policy(BoundarySolver solver, DualSolution sol)
    : solver_(std::move(solver)), sol_(sol) {}

Policy::Policy(const ModelParams& params, ThresholdConvention convention)
    : solver_(DualUtility(params, convention)), sol_(solver_.solve()) {}

double Policy::stopped_value(double x) const {
  const auto& q = solver_.params();
  return q.v2 / solver_.constants().rho * utility().u2(q.k * x);
}

double Policy::value_function(double x) const {
  if (!(x > 0)) throw DomainError("value_function: wealth must be positive");
  if (sol_.regime == Regime::Stopping && x >= sol_.x_star) return stopped_value(x);
  const auto& q = solver_.params();
  const double y = solver_.shadow_of_wealth(x, sol_);
  return y * (x + q.w / q.r) + solver_.phi_continuation(y, sol_);
}

double Policy::optimal_consumption(double y) const {
  return utility().inv_marginal_consumption(y);
}

double Policy::optimal_labor(double y) const {
  return 1 - utility().inv_marginal_leisure(y);
}

double Policy::optimal_portfolio(double y) const {
  if (sol_.regime == Regime::Stopping && y < sol_.y_star * (1 - 1e-12))
    throw OutOfRangeError("optimal_portfolio: y lies in the stopping region");
  const auto& dc = solver_.constants();
  const auto& q = solver_.params();
  const double K = 2.0 / (dc.theta * dc.theta * (dc.n1 - dc.n2));
  const double i1 = solver_.tail_integral(y, dc.n1);
  const double lower = sol_.regime == Regime::Stopping ? sol_.y_star : 0.0;
  const double i2 = solver_.definite_integral(lower, y, dc.n2);
  const double bracket = sol_.c_coef * dc.n2 * (dc.n2 - 1) * std::pow(y, dc.n2 - 1) -
                         2 * utility().ubar1(y) / (dc.theta * dc.theta * y) +
                         K * dc.n1 * (dc.n1 - 1) * std::pow(y, dc.n1 - 1) * i1 -
                         K * dc.n2 * (dc.n2 - 1) * std::pow(y, dc.n2 - 1) * i2;
  return dc.theta / q.sigma * bracket;
}

PolicyPoint Policy::policy_at_wealth(double x) const {
  if (!(x > 0)) throw DomainError("policy_at_wealth: wealth must be positive");
  const auto& q = solver_.params();
  PolicyPoint pt;
  pt.x = x;
  if (sol_.regime == Regime::Stopping && x >= sol_.x_star) {
    // annuitized: V'(x) = (v2/rho) k U2'(k x)
    pt.stopped = true;
    pt.y = q.v2 / solver_.constants().rho * q.k * std::pow(q.k * x, -q.p2);
    pt.c_star = q.k * x;
    pt.value = stopped_value(x);
    return pt;
  }
  pt.y = solver_.shadow_of_wealth(x, sol_);
  pt.c_star = optimal_consumption(pt.y);
  pt.b_star = optimal_labor(pt.y);
  pt.pi_star = optimal_portfolio(pt.y);
  pt.value = pt.y * (x + q.w / q.r) + solver_.phi_continuation(pt.y, sol_);
  return pt;
}

}  // namespace annuity
