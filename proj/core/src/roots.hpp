#pragma once

#include <functional>

namespace annuity::detail {

// Root of f on [lo, hi] given f(lo), f(hi) of opposite sign. Secant steps
// (Illinois-weighted false position) with a forced bisection whenever the
// bracket fails to halve over three iterations. Stops when the bracket width
// falls below tol_abs + tol_rel*|root|.
double solve_bracketed(const std::function<double(double)>& f, double lo, double hi, double f_lo,
                       double f_hi, double tol_rel, double tol_abs = 0.0, int max_iter = 400);

// Same, with f a function of y > 0 and the search done in log y.
double solve_bracketed_log(const std::function<double(double)>& f, double lo, double hi,
                           double f_lo, double f_hi, double tol_rel);

}  // namespace annuity::detail
