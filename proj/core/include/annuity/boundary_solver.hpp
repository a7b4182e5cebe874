#pragma once

#include "annuity/dual_utility.hpp"
#include "annuity/model.hpp"

namespace annuity {

struct DualSolution {
  Regime regime = Regime::Stopping;
  double y_star = 0;  // free boundary; 0 in the ruined regime
  double c_coef = 0;  // coefficient of y^{n2} in phi
  double x_star = 0;  // critical wealth I(rho y*); +inf in the ruined regime
  double y0 = 0;      // zero of the combined conjugate; 0 in the ruined regime
};

// The dual obstacle problem for phi(y): the ODE
//   -rho phi + (rho - r) y phi' + ½θ² y² phi'' + Ubar1(y) = 0
// for y > y*, and phi = (1/rho) Ubar2(rho y) - (w/r) y below y*. Everything is
// closed form once y* is known; the integrals against Ubar1 are sums of powers.
class BoundarySolver {
 public:
  explicit BoundarySolver(DualUtility utility);

  const DualUtility& utility() const { return u_; }
  const ModelParams& params() const { return u_.params(); }
  const DerivedConstants& constants() const { return u_.constants(); }
  Regime regime() const { return regime_; }

  double ubar_combined(double y) const;
  double find_y0() const;

  // ∫_a^b (-Ubar1(z)) z^{-n-1} dz for 0 <= a, b <= +inf (signed if b < a).
  double definite_integral(double a, double b, double n) const;
  // ∫_{+inf}^{y} (-Ubar1(z)) z^{-n-1} dz. Diverges unless n > 1.
  double tail_integral(double y, double n) const;

  double F(double y) const;
  DualSolution solve_free_boundary() const;
  // Stopping: solve_free_boundary(). Ruined: the boundary-free solution.
  DualSolution solve() const;
  double closed_form_y_star_no_labor() const;
  double c_coefficient(double y_star) const;

  double obstacle(double y) const;
  double obstacle_prime(double y) const;
  double obstacle_second(double y) const;

  double phi(double y, const DualSolution& sol) const;
  double phi_prime(double y, const DualSolution& sol) const;
  double phi_second(double y, const DualSolution& sol) const;

  // The closed-form continuation branch, usable on either side of y*.
  double phi_continuation(double y, const DualSolution& sol) const;
  double phi_continuation_prime(double y, const DualSolution& sol) const;
  double phi_continuation_second(double y, const DualSolution& sol) const;

  // x(y) = -phi'(y) - w/r on the continuation region y* <= y <= 1e9 y*.
  double wealth_of_shadow(double y, const DualSolution& sol) const;
  // x(y) from the continuation branch with no range check (used for censored
  // paths and overshoot diagnostics).
  double continuation_wealth(double y, const DualSolution& sol) const;
  // Inverse of wealth_of_shadow for 0 < x < x*.
  double shadow_of_wealth(double x, const DualSolution& sol) const;

  // sup_y of the domain, relative to y*
  static constexpr double kMaxShadowRatio = 1e9;

 private:
  struct Integrals {
    double i1;  // ∫_{+inf}^{y} (-Ubar1) z^{-n1-1}
    double i2;  // ∫_{y*}^{y} (-Ubar1) z^{-n2-1}, lower limit 0 when ruined
  };
  Integrals integrals(double y, const DualSolution& sol) const;
  double ruined_reference_shadow() const;

  DualUtility u_;
  Regime regime_;
  double K_;   // 2 / (θ²(n1 - n2))
  double b2_;  // Ubar2(rho z) = b2 z^{p2'}
};

}  // namespace annuity
