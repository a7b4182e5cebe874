#include "annuity/boundary_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "annuity/errors.hpp"
#include "roots.hpp"

namespace annuity {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BoundarySolver::BoundarySolver(DualUtility utility)
    : u_(std::move(utility)), regime_(stopping_regime(u_.constants(), u_.params())) {
  const auto& dc = u_.constants();
  const auto& q = u_.params();
  K_ = 2.0 / (dc.theta * dc.theta * (dc.n1 - dc.n2));
  b2_ = -(std::pow(q.v2, 1 - dc.p2p) / dc.p2p) * std::pow(dc.rho / q.k, dc.p2p);
}

double BoundarySolver::ubar_combined(double y) const {
  const auto& dc = constants();
  return u_.ubar1(y) + (dc.n_p2p / dc.rho) * b2_ * std::pow(y, dc.p2p) + params().w * y;
}

double BoundarySolver::find_y0() const {
  if (regime_ != Regime::Stopping) throw RegimeError("find_y0 needs the stopping regime");
  const double start = std::isfinite(constants().y_tilde) ? constants().y_tilde : 1e-6;
  double lo = start, hi = start;
  double f_lo = ubar_combined(lo), f_hi = f_lo;
  for (int i = 0; f_lo >= 0; ++i) {
    if (i > 300) throw BracketError("find_y0: no negative value of the combined conjugate");
    lo *= 0.1;
    f_lo = ubar_combined(lo);
  }
  for (int i = 0; f_hi <= 0; ++i) {
    if (i > 300) throw BracketError("find_y0: no positive value of the combined conjugate");
    hi *= 10;
    f_hi = ubar_combined(hi);
  }
  return detail::solve_bracketed_log([this](double y) { return ubar_combined(y); }, lo, hi, f_lo,
                                     f_hi, 1e-14);
}

double BoundarySolver::definite_integral(double a, double b, double n) const {
  if (b < a) return -definite_integral(b, a, n);
  double total = 0;
  for (const auto& seg : u_.segments()) {
    const double lo = std::max(seg.lower, a);
    const double hi = std::min(seg.upper, b);
    if (!(lo < hi)) continue;
    for (const auto& t : seg.power_terms()) {
      const double q = t.exponent - n;
      if (hi == kInf && q >= 0)
        throw DivergenceError("integral of Ubar1 diverges at +infinity for this exponent");
      if (lo == 0 && q <= 0) throw DivergenceError("integral of Ubar1 diverges at 0");
      const double at_hi = hi == kInf ? 0.0 : std::pow(hi, q);
      const double at_lo = lo == 0 ? 0.0 : std::pow(lo, q);
      total += -t.coef * (at_hi - at_lo) / q;
    }
  }
  return total;
}

double BoundarySolver::tail_integral(double y, double n) const {
  if (!(y > 0)) throw DomainError("tail_integral: y must be positive");
  return -definite_integral(y, kInf, n);
}

double BoundarySolver::F(double y) const {
  if (regime_ != Regime::Stopping) throw RegimeError("F is defined only in the stopping regime");
  const auto& dc = constants();
  const double n1 = dc.n1;
  return -tail_integral(y, n1) +
         (dc.n_p2p / dc.rho) * b2_ * std::pow(y, dc.p2p - n1) / (dc.p2p - n1) +
         params().w * std::pow(y, 1 - n1) / (1 - n1);
}

double BoundarySolver::c_coefficient(double ys) const {
  const auto& dc = constants();
  const auto& q = params();
  return std::pow(ys, -dc.n2) / (dc.n1 - dc.n2) *
         ((dc.n1 - dc.p2p) / dc.rho * b2_ * std::pow(ys, dc.p2p) - (dc.n1 - 1) * (q.w / q.r) * ys);
}

DualSolution BoundarySolver::solve_free_boundary() const {
  if (regime_ != Regime::Stopping)
    throw RegimeError("no stopping boundary: alpha(1-p1) <= 1-p2 (ruined regime)");
  DualSolution sol;
  sol.regime = Regime::Stopping;
  sol.y0 = find_y0();
  const double f_hi = F(sol.y0);
  if (!(f_hi < 0)) throw BracketError("free boundary: F(y0) is not negative");
  double lo = std::min(1e-3 * params().v1 * constants().y_tilde0, 1e-3 * sol.y0);
  double f_lo = F(lo);
  for (int i = 0; !(f_lo > 0); ++i) {
    if (i > 200) throw BracketError("free boundary: F has no positive value below y0");
    lo *= 0.1;
    f_lo = F(lo);
  }
  sol.y_star =
      detail::solve_bracketed_log([this](double y) { return F(y); }, lo, sol.y0, f_lo, f_hi, 1e-14);
  sol.c_coef = c_coefficient(sol.y_star);
  sol.x_star = u_.inv_marginal_wealth(constants().rho * sol.y_star);
  return sol;
}

DualSolution BoundarySolver::solve() const {
  if (regime_ == Regime::Stopping) return solve_free_boundary();
  DualSolution sol;
  sol.regime = Regime::Ruined;
  sol.x_star = kInf;
  return sol;
}

double BoundarySolver::closed_form_y_star_no_labor() const {
  if (params().b_max != 0) throw PreconditionError("closed-form boundary requires b_max = 0");
  if (regime_ != Regime::Stopping)
    throw RegimeError("closed-form boundary exists only when p1' != p2' in the stopping regime");
  const auto& dc = constants();
  const auto& q = params();
  const double rhs = -(dc.p1p / dc.p2p) * (dc.theta * dc.theta / (2 * dc.rho)) *
                     (dc.p1p - dc.n1) * (dc.p2p - dc.n2) * std::pow(q.alpha, dc.p1p - 1) *
                     std::pow(dc.rho / q.k, dc.p2p) * std::pow(q.v2, 1 - dc.p2p) *
                     std::pow(q.v1, dc.p1p - 1);
  return std::pow(rhs, 1 / (dc.p1p - dc.p2p));
}

double BoundarySolver::obstacle(double y) const {
  const auto& q = params();
  return b2_ * std::pow(y, constants().p2p) / constants().rho - (q.w / q.r) * y;
}

double BoundarySolver::obstacle_prime(double y) const {
  const auto& dc = constants();
  return b2_ * dc.p2p * std::pow(y, dc.p2p - 1) / dc.rho - params().w / params().r;
}

double BoundarySolver::obstacle_second(double y) const {
  const auto& dc = constants();
  return b2_ * dc.p2p * (dc.p2p - 1) * std::pow(y, dc.p2p - 2) / dc.rho;
}

BoundarySolver::Integrals BoundarySolver::integrals(double y, const DualSolution& sol) const {
  const auto& dc = constants();
  const double lower = sol.regime == Regime::Stopping ? sol.y_star : 0.0;
  return {tail_integral(y, dc.n1), definite_integral(lower, y, dc.n2)};
}

double BoundarySolver::phi_continuation(double y, const DualSolution& sol) const {
  const auto& dc = constants();
  const auto in = integrals(y, sol);
  return sol.c_coef * std::pow(y, dc.n2) + K_ * std::pow(y, dc.n1) * in.i1 -
         K_ * std::pow(y, dc.n2) * in.i2;
}

double BoundarySolver::phi_continuation_prime(double y, const DualSolution& sol) const {
  const auto& dc = constants();
  const auto in = integrals(y, sol);
  return sol.c_coef * dc.n2 * std::pow(y, dc.n2 - 1) +
         K_ * dc.n1 * std::pow(y, dc.n1 - 1) * in.i1 - K_ * dc.n2 * std::pow(y, dc.n2 - 1) * in.i2;
}

double BoundarySolver::phi_continuation_second(double y, const DualSolution& sol) const {
  const auto& dc = constants();
  const auto in = integrals(y, sol);
  return sol.c_coef * dc.n2 * (dc.n2 - 1) * std::pow(y, dc.n2 - 2) +
         K_ * dc.n1 * (dc.n1 - 1) * std::pow(y, dc.n1 - 2) * in.i1 -
         K_ * dc.n2 * (dc.n2 - 1) * std::pow(y, dc.n2 - 2) * in.i2 -
         2 * u_.ubar1(y) / (dc.theta * dc.theta * y * y);
}

double BoundarySolver::phi(double y, const DualSolution& sol) const {
  if (!(y > 0)) throw DomainError("phi: y must be positive");
  if (sol.regime == Regime::Stopping && y <= sol.y_star) return obstacle(y);
  return phi_continuation(y, sol);
}

double BoundarySolver::phi_prime(double y, const DualSolution& sol) const {
  if (!(y > 0)) throw DomainError("phi_prime: y must be positive");
  if (sol.regime == Regime::Stopping && y <= sol.y_star) return obstacle_prime(y);
  return phi_continuation_prime(y, sol);
}

double BoundarySolver::phi_second(double y, const DualSolution& sol) const {
  if (!(y > 0)) throw DomainError("phi_second: y must be positive");
  if (sol.regime == Regime::Stopping && y <= sol.y_star) return obstacle_second(y);
  return phi_continuation_second(y, sol);
}

double BoundarySolver::continuation_wealth(double y, const DualSolution& sol) const {
  return -phi_continuation_prime(y, sol) - params().w / params().r;
}

double BoundarySolver::wealth_of_shadow(double y, const DualSolution& sol) const {
  if (!(y > 0)) throw DomainError("wealth_of_shadow: y must be positive");
  if (sol.regime == Regime::Stopping) {
    if (y < sol.y_star * (1 - 1e-12))
      throw OutOfRangeError("wealth_of_shadow: y lies in the stopping region");
    if (y > kMaxShadowRatio * sol.y_star)
      throw OutOfRangeError("wealth_of_shadow: y beyond the mapped range (near-ruin wealth)");
  }
  return continuation_wealth(y, sol);
}

double BoundarySolver::ruined_reference_shadow() const {
  const double yt = constants().y_tilde;
  return std::isfinite(yt) && yt > 0 ? yt : 1e-6;
}

double BoundarySolver::shadow_of_wealth(double x, const DualSolution& sol) const {
  if (!(x > 0)) throw DomainError("shadow_of_wealth: wealth must be positive");
  auto g = [&](double y) { return continuation_wealth(y, sol) - x; };
  double lo, hi, g_lo, g_hi;
  if (sol.regime == Regime::Stopping) {
    if (x >= sol.x_star) throw OutOfRangeError("shadow_of_wealth: wealth is in the stopping region");
    lo = sol.y_star;
    g_lo = g(lo);
    if (g_lo <= 0) return sol.y_star;  // x within rounding of x*
    const double cap = kMaxShadowRatio * sol.y_star;
    hi = 2 * sol.y_star;
    g_hi = g(hi);
    while (g_hi > 0) {
      if (hi >= cap)
        throw OutOfRangeError("shadow_of_wealth: wealth below the attainable range");
      hi = std::min(4 * hi, cap);
      g_hi = g(hi);
    }
  } else {
    lo = hi = ruined_reference_shadow();
    g_lo = g_hi = g(lo);
    for (int i = 0; g_lo <= 0; ++i) {
      if (i > 300) throw OutOfRangeError("shadow_of_wealth: wealth above the mapped range");
      lo *= 0.25;
      g_lo = g(lo);
    }
    for (int i = 0; g_hi >= 0; ++i) {
      if (i > 300) throw OutOfRangeError("shadow_of_wealth: wealth below the attainable range");
      hi *= 4;
      g_hi = g(hi);
    }
  }
  return detail::solve_bracketed_log(g, lo, hi, g_lo, g_hi, 1e-14);
}

}  // namespace annuity
