#include "annuity/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "annuity/errors.hpp"

namespace annuity {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

struct Field {
  const char* key;
  double ModelParams::*member;
};

constexpr Field kFields[] = {
    {"r", &ModelParams::r},         {"mu", &ModelParams::mu},
    {"sigma", &ModelParams::sigma}, {"delta", &ModelParams::delta},
    {"k", &ModelParams::k},         {"w", &ModelParams::w},
    {"b_max", &ModelParams::b_max}, {"alpha", &ModelParams::alpha},
    {"beta", &ModelParams::beta},   {"p1", &ModelParams::p1},
    {"p2", &ModelParams::p2},       {"v1", &ModelParams::v1},
    {"v2", &ModelParams::v2},
};

double ModelParams::*member_of(std::string_view key) {
  for (const auto& f : kFields)
    if (key == f.key) return f.member;
  throw ValidationError("unknown parameter '" + std::string(key) + "'");
}

}  // namespace

ModelParams validate(const ModelParams& raw) {
  for (const auto& f : kFields)
    if (!std::isfinite(raw.*f.member))
      throw ValidationError(std::string(f.key) + " must be finite");
  require(raw.r > 0, "r must be positive");
  require(raw.sigma > 0, "sigma must be positive");
  require(raw.mu > raw.r, "mu must exceed r");
  require(raw.k > raw.r, "k must exceed r");
  require(raw.delta >= 0, "delta must be non-negative");
  require(raw.w > 0, "w must be positive");
  require(raw.p1 > 1, "p1 must exceed 1");
  require(raw.p2 > 1, "p2 must exceed 1");
  require(raw.alpha > 0, "alpha must be positive");
  require(raw.beta > 0, "beta must be positive");
  require(raw.b_max >= 0 && raw.b_max <= 1, "b_max must lie in [0, 1]");
  require(raw.v1 > 0, "v1 must be positive");
  require(raw.v2 > 0, "v2 must be positive");
  return raw;
}

DerivedConstants derive_constants(const ModelParams& params, ThresholdConvention convention) {
  const ModelParams& q = params;
  DerivedConstants dc;
  dc.convention = convention;
  dc.theta = (q.mu - q.r) / q.sigma;
  dc.rho = q.r + q.delta;

  // roots of n(x); the product form avoids cancellation in the small root
  const double a = 0.5 * dc.theta * dc.theta;
  const double b = dc.rho - q.r - a;
  const double c = -dc.rho;
  const double disc = std::sqrt(b * b - 4 * a * c);
  const double t = -0.5 * (b + std::copysign(disc, b));
  const double ra = t / a;
  const double rb = c / t;
  dc.n1 = std::max(ra, rb);
  dc.n2 = std::min(ra, rb);

  const double s = 1 - q.p1;
  const double m = q.alpha + q.beta;
  dc.p = m * s / (m * s - 1);
  dc.p1p = q.alpha * s / (q.alpha * s - 1);
  dc.p2p = (q.p2 - 1) / q.p2;
  dc.n_p2p = n_poly(dc, q.r, dc.p2p);
  dc.l_min = 1 - q.b_max;

  dc.c_tilde = q.alpha * q.w / q.beta;
  dc.c_bar = dc.c_tilde * dc.l_min;
  dc.y_tilde0 = q.alpha * std::pow(dc.c_tilde, q.alpha * s - 1);
  // l_min = 0 sends y_bar to +inf: the minimum-leisure region disappears
  dc.y_bar0 = q.b_max == 0 ? dc.y_tilde0 : dc.y_tilde0 * std::pow(dc.l_min, m * s - 1);
  const double scale = convention == ThresholdConvention::scaled ? q.v1 : 1.0;
  dc.y_tilde = scale * dc.y_tilde0;
  dc.y_bar = scale * dc.y_bar0;

  const double A_tilde0 = -std::pow(q.alpha, 1 - dc.p1p) / dc.p1p;
  const double A_bar0 =
      q.b_max == 0 ? A_tilde0 : A_tilde0 * std::pow(dc.l_min, -(q.beta / q.alpha) * dc.p1p);
  const double A0 = -(m / dc.p) * std::pow(q.alpha, -q.alpha * dc.p / m) *
                    std::pow(q.beta, -q.beta * dc.p / m) * std::pow(q.w, q.beta * dc.p / m);
  dc.A_tilde = std::pow(q.v1, 1 - dc.p1p) * A_tilde0;
  dc.A_bar = std::pow(q.v1, 1 - dc.p1p) * A_bar0;
  dc.A_coef = std::pow(q.v1, 1 - dc.p) * A0;
  return dc;
}

double n_poly(const DerivedConstants& dc, double r, double x) {
  const double h = 0.5 * dc.theta * dc.theta;
  return h * x * x + (dc.rho - r - h) * x - dc.rho;
}

Regime stopping_regime(const DerivedConstants& dc, const ModelParams& params) {
  const double lhs = params.alpha * (1 - params.p1);
  const double rhs = 1 - params.p2;
  const bool stopping = lhs > rhs;
  // both tests are the same inequality; they may only disagree inside rounding
  const bool by_exponents = dc.p1p < dc.p2p;
  if (stopping != by_exponents && std::abs(lhs - rhs) > 1e-12 && std::abs(dc.p1p - dc.p2p) > 1e-12)
    throw std::logic_error("regime tests disagree: alpha(1-p1) > 1-p2 vs p1' < p2'");
  return stopping ? Regime::Stopping : Regime::Ruined;
}

ModelParams base_preset() { return ModelParams{}; }

ModelParams preset(std::string_view name) {
  ModelParams p = base_preset();
  if (name == "base") return p;
  if (name == "m1") {
    p.b_max = 0;
  } else if (name == "m2") {
    p.b_max = 0.25;
    p.beta = 1.0;
  } else if (name == "m3") {
    p.b_max = 0.5;
    p.beta = 0.5;
  } else {
    throw ValidationError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> preset_names() { return {"base", "m1", "m2", "m3"}; }

double get_param(const ModelParams& params, std::string_view key) {
  return params.*member_of(key);
}

void set_param(ModelParams& params, std::string_view key, double value) {
  params.*member_of(key) = value;
}

const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : kFields) out.emplace_back(f.key);
    return out;
  }();
  return keys;
}

std::string to_string(Regime regime) {
  return regime == Regime::Stopping ? "Stopping" : "Ruined";
}

std::string to_string(ThresholdConvention convention) {
  return convention == ThresholdConvention::scaled ? "scaled" : "unscaled";
}

ThresholdConvention parse_convention(std::string_view text) {
  if (text == "scaled") return ThresholdConvention::scaled;
  if (text == "unscaled") return ThresholdConvention::unscaled;
  throw ValidationError("threshold convention must be 'scaled' or 'unscaled'");
}

}  // namespace annuity
