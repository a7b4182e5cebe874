#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "annuity/model.hpp"

namespace annuity {

struct PowerTerm {
  double coef;
  double exponent;
};

// One smooth piece of Ubar1: sum of coef * y^exponent on [lower, upper].
struct UtilitySegment {
  double lower;
  double upper;
  std::array<PowerTerm, 2> terms;
  std::size_t n_terms;

  std::span<const PowerTerm> power_terms() const { return {terms.data(), n_terms}; }
};

// Leveraged conjugates Ubar1(y) = sup_{c, l} [v1 U1(c,l) - (c + w l) y] and
// Ubar2(y) = sup_x [v2 U2(k x) - x y], plus the maps that attain the sups.
// Leisure l lives in [1 - b_max, 1].
class DualUtility {
 public:
  DualUtility(const ModelParams& params, const DerivedConstants& dc);
  explicit DualUtility(const ModelParams& params,
                       ThresholdConvention convention = ThresholdConvention::scaled);

  const ModelParams& params() const { return params_; }
  const DerivedConstants& constants() const { return dc_; }

  // unleveraged direct utilities
  double u1(double c, double l) const;
  double u2(double x) const;

  double ubar1(double y) const;
  double ubar1_prime(double y) const;
  double ubar2(double y) const;
  double ubar2_prime(double y) const;

  double inv_marginal_consumption(double y) const;
  double inv_marginal_leisure(double y) const;
  double inv_marginal_wealth(double y) const;

  // 1: full leisure (y <= y_tilde), 2: flexible, 3: minimum leisure (y >= y_bar)
  int region(double y) const;

  std::span<const UtilitySegment> segments() const { return {segments_.data(), n_segments_}; }

 private:
  const UtilitySegment& segment_for(double y) const;

  ModelParams params_;
  DerivedConstants dc_;
  std::array<UtilitySegment, 3> segments_{};
  std::size_t n_segments_ = 0;
  std::array<int, 3> segment_region_{};
};

}  // namespace annuity
