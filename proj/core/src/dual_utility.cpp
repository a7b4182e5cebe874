#include "annuity/dual_utility.hpp"

#include <cmath>
#include <limits>

#include "annuity/errors.hpp"

namespace annuity {

DualUtility::DualUtility(const ModelParams& params, ThresholdConvention convention)
    : DualUtility(params, derive_constants(validate(params), convention)) {}

DualUtility::DualUtility(const ModelParams& params, const DerivedConstants& dc)
    : params_(params), dc_(dc) {
  const double w = params_.w;
  auto add = [&](int region, double lo, double hi, UtilitySegment seg) {
    if (!(lo < hi)) return;
    seg.lower = lo;
    seg.upper = hi;
    segment_region_[n_segments_] = region;
    segments_[n_segments_++] = seg;
  };
  const double inf = std::numeric_limits<double>::infinity();
  UtilitySegment full{0, 0, {{{dc_.A_tilde, dc_.p1p}, {-w, 1.0}}}, 2};
  if (params_.b_max == 0) {
    add(1, 0, inf, full);
    return;
  }
  add(1, 0, dc_.y_tilde, full);
  add(2, dc_.y_tilde, dc_.y_bar, UtilitySegment{0, 0, {{{dc_.A_coef, dc_.p}, {0, 0}}}, 1});
  add(3, dc_.y_bar, inf,
      UtilitySegment{0, 0, {{{dc_.A_bar, dc_.p1p}, {-w * dc_.l_min, 1.0}}}, 2});
}

double DualUtility::u1(double c, double l) const {
  if (!(c > 0)) throw DomainError("u1: consumption must be positive");
  if (!(l > 0 && l <= 1)) throw DomainError("u1: leisure must lie in (0, 1]");
  const double s = 1 - params_.p1;
  return std::pow(l, params_.beta * s) * std::pow(c, params_.alpha * s) / s;
}

double DualUtility::u2(double x) const {
  if (!(x > 0)) throw DomainError("u2: wealth must be positive");
  const double s = 1 - params_.p2;
  return std::pow(x, s) / s;
}

int DualUtility::region(double y) const {
  if (params_.b_max == 0 || y <= dc_.y_tilde) return 1;
  if (y < dc_.y_bar) return 2;
  return 3;
}

const UtilitySegment& DualUtility::segment_for(double y) const {
  const int reg = region(y);
  for (std::size_t i = 0; i < n_segments_; ++i)
    if (segment_region_[i] == reg) return segments_[i];
  return segments_[n_segments_ - 1];
}

double DualUtility::ubar1(double y) const {
  double v = 0;
  for (const auto& t : segment_for(y).power_terms()) v += t.coef * std::pow(y, t.exponent);
  return v;
}

double DualUtility::ubar1_prime(double y) const {
  double v = 0;
  for (const auto& t : segment_for(y).power_terms())
    v += t.coef * t.exponent * std::pow(y, t.exponent - 1);
  return v;
}

double DualUtility::ubar2(double y) const {
  return -(std::pow(params_.v2, 1 - dc_.p2p) / dc_.p2p) * std::pow(y / params_.k, dc_.p2p);
}

double DualUtility::ubar2_prime(double y) const { return -inv_marginal_wealth(y); }

double DualUtility::inv_marginal_consumption(double y) const {
  const double a = params_.alpha;
  const double b = params_.beta;
  const double u = y / params_.v1 / a;
  switch (region(y)) {
    case 1:
      return std::pow(u, dc_.p1p - 1);
    case 2:
      return std::pow(u, dc_.p - 1) * std::pow(a * params_.w / b, b * dc_.p / (a + b));
    default:
      return std::pow(u, dc_.p1p - 1) * std::pow(dc_.l_min, -(b / a) * dc_.p1p);
  }
}

double DualUtility::inv_marginal_leisure(double y) const {
  const double a = params_.alpha;
  const double b = params_.beta;
  switch (region(y)) {
    case 1:
      return 1.0;
    case 2:
      return std::pow(y / params_.v1 / a, dc_.p - 1) *
             std::pow(a * params_.w / b, b * dc_.p / (a + b) - 1);
    default:
      return dc_.l_min;
  }
}

double DualUtility::inv_marginal_wealth(double y) const {
  const double k = params_.k;
  return std::pow(y / (params_.v2 * k), dc_.p2p - 1) / k;
}

}  // namespace annuity
