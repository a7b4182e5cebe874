#include "roots.hpp"

#include <cmath>

#include "annuity/errors.hpp"

namespace annuity::detail {

double solve_bracketed(const std::function<double(double)>& f, double lo, double hi, double f_lo,
                       double f_hi, double tol_rel, double tol_abs, int max_iter) {
  if (f_lo == 0) return lo;
  if (f_hi == 0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) throw BracketError("root is not bracketed");
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  int side = 0;
  double width_before = std::abs(b - a);
  for (int it = 0; it < max_iter; ++it) {
    double m;
    if (it % 3 == 2 && std::abs(b - a) > 0.5 * width_before) {
      m = 0.5 * (a + b);
    } else {
      m = (a * fb - b * fa) / (fb - fa);
      if (!(m > std::min(a, b) && m < std::max(a, b))) m = 0.5 * (a + b);
    }
    if (it % 3 == 2) width_before = std::abs(b - a);
    const double fm = f(m);
    if (fm == 0) return m;
    if (std::signbit(fm) == std::signbit(fb)) {
      b = m;
      fb = fm;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = m;
      fa = fm;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) <= tol_abs + tol_rel * std::abs(m)) return 0.5 * (a + b);
  }
  throw ConvergenceError("bracketed root search did not converge");
}

double solve_bracketed_log(const std::function<double(double)>& f, double lo, double hi,
                           double f_lo, double f_hi, double tol_rel) {
  auto g = [&](double t) { return f(std::exp(t)); };
  // an absolute tolerance in log y is a relative one in y
  const double t = solve_bracketed(g, std::log(lo), std::log(hi), f_lo, f_hi, 0.0, tol_rel);
  return std::exp(t);
}

}  // namespace annuity::detail
