#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace annuity {

struct ModelParams {
  double r = 0.035;      // risk-free rate
  double mu = 0.08;      // risky drift
  double sigma = 0.15;   // volatility
  double delta = 0.01;   // force of mortality
  double k = 0.095;      // annuity payment per unit of wealth
  double w = 100.0;      // wage rate
  double b_max = 0.5;    // maximum labor rate
  double alpha = 0.5;    // consumption elasticity
  double beta = 0.5;     // leisure elasticity
  double p1 = 2.0;       // running risk aversion
  double p2 = 2.0;       // terminal risk aversion
  double v1 = 0.01;      // running-utility weight
  double v2 = 0.1;       // stopping-utility weight

  bool operator==(const ModelParams&) const = default;
};

// Where the leisure regions sit once v1 is folded in. `scaled` is the exact
// conjugate of v1*U1. `unscaled` keeps the unleveraged thresholds on the
// leveraged shadow price: it reproduces the critical wealth levels quoted for
// the labor models in the reference tables but makes Ubar1 jump at both seams.
enum class ThresholdConvention { scaled, unscaled };

enum class Regime { Stopping, Ruined };

struct DerivedConstants {
  double theta = 0;
  double rho = 0;
  double n1 = 0;
  double n2 = 0;
  double p = 0;
  double p1p = 0;
  double p2p = 0;
  double n_p2p = 0;
  double l_min = 0;
  double y_tilde0 = 0;  // unleveraged thresholds
  double y_bar0 = 0;
  double y_tilde = 0;   // thresholds in leveraged shadow-price units
  double y_bar = 0;
  double A_tilde = 0;
  double A_coef = 0;
  double A_bar = 0;
  double c_bar = 0;
  double c_tilde = 0;
  ThresholdConvention convention = ThresholdConvention::scaled;
};

// Throws ValidationError naming the first violated constraint.
ModelParams validate(const ModelParams& raw);

DerivedConstants derive_constants(const ModelParams& params,
                                  ThresholdConvention convention = ThresholdConvention::scaled);

Regime stopping_regime(const DerivedConstants& dc, const ModelParams& params);

// n(x) = ½θ²x² + (ρ−r−½θ²)x − ρ
double n_poly(const DerivedConstants& dc, double r, double x);

ModelParams base_preset();
// "base", "m1", "m2", "m3". Throws ValidationError for unknown names.
ModelParams preset(std::string_view name);
std::vector<std::string> preset_names();

// Named field access used by --set and sweeps. Throws ValidationError for unknown keys.
double get_param(const ModelParams& params, std::string_view key);
void set_param(ModelParams& params, std::string_view key, double value);
const std::vector<std::string>& param_keys();

std::string to_string(Regime regime);
std::string to_string(ThresholdConvention convention);
ThresholdConvention parse_convention(std::string_view text);

}  // namespace annuity
