#include "annuity/io.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "annuity/errors.hpp"

#ifndef ANNUITY_VERSION
#define ANNUITY_VERSION "dev"
#endif

namespace annuity {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string tool_version() { return ANNUITY_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const ModelParams& p) {
  json j;
  for (const auto& key : param_keys()) j[key] = get_param(p, key);
  return j;
}

ModelParams params_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("parameter document must be a JSON object");
  ModelParams p;
  std::set<std::string> seen;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number()) throw ValidationError("parameter '" + key + "' must be a number");
    set_param(p, key, value.get<double>());
    seen.insert(key);
  }
  for (const auto& key : param_keys())
    if (!seen.count(key)) throw ValidationError("parameter '" + key + "' is missing");
  return validate(p);
}

json to_json(const DerivedConstants& dc) {
  return {{"theta", dc.theta},        {"rho", dc.rho},
          {"n1", dc.n1},              {"n2", dc.n2},
          {"p", dc.p},                {"p1p", dc.p1p},
          {"p2p", dc.p2p},            {"n_p2p", dc.n_p2p},
          {"l_min", dc.l_min},        {"y_tilde", number(dc.y_tilde)},
          {"y_bar", number(dc.y_bar)}, {"y_tilde0", number(dc.y_tilde0)},
          {"y_bar0", number(dc.y_bar0)}, {"A_tilde", dc.A_tilde},
          {"A_coef", dc.A_coef},      {"A_bar", number(dc.A_bar)},
          {"c_bar", dc.c_bar},        {"c_tilde", dc.c_tilde},
          {"threshold_convention", to_string(dc.convention)}};
}

json to_json(const DualSolution& sol) {
  json j{{"regime", to_string(sol.regime)}};
  if (sol.regime == Regime::Stopping) {
    j["y_star"] = sol.y_star;
    j["c_coef"] = sol.c_coef;
    j["x_star"] = sol.x_star;
    j["y0"] = sol.y0;
  }
  return j;
}

json to_json(const PolicyPoint& pt) {
  return {{"x", pt.x},           {"y", pt.y},         {"c_star", pt.c_star},
          {"b_star", pt.b_star}, {"pi_star", pt.pi_star}, {"value", pt.value},
          {"stopped", pt.stopped}};
}

json to_json(const SimulationConfig& cfg) {
  json j{{"n_paths", cfg.n_paths}, {"dt", cfg.dt},     {"horizon", cfg.horizon},
         {"seed", cfg.seed},       {"x0", cfg.x0}};
  j["forced_stop"] = cfg.forced_stop ? json(*cfg.forced_stop) : json(nullptr);
  return j;
}

json to_json(const Summary& s) {
  return {{"min", s.min}, {"p05", s.p05}, {"p25", s.p25},   {"p50", s.p50}, {"p75", s.p75},
          {"p90", s.p90}, {"max", s.max}, {"mean", s.mean}, {"std", s.std}};
}

json to_json(const CohortStats& st, double rho) {
  json j;
  j["n_paths"] = st.paths.size();
  j["n_censored"] = st.n_censored;
  j["mean_tau"] = st.mean_tau;
  json probs = json::object();
  for (const auto& [n, p] : st.prob_within) probs[format_number(n)] = p;
  j["prob_within_years"] = probs;
  j["table"] = {{"labor_income", to_json(st.labor_income)},
                {"consumption", to_json(st.consumption)},
                {"annuity", to_json(st.annuity)},
                {"annuity_pv", to_json(st.annuity_pv)},
                {"net_wealth", to_json(st.net_wealth)},
                {"tau", to_json(st.tau)}};
  json prof = json::array();
  for (const auto& y : st.profile)
    prof.push_back({{"t", y.t},
                    {"active", y.active},
                    {"consumption", y.consumption},
                    {"labor_income", y.labor_income},
                    {"portfolio", y.portfolio}});
  j["yearly_profile"] = prof;

  // yearly tau bins plus a count of censored paths
  std::vector<double> stopped_tau, payments, payment_pv;
  for (const auto& p : st.paths) {
    if (!p.censored) stopped_tau.push_back(p.tau);
    payments.push_back(p.annual_annuity);
    payment_pv.push_back(annuity_payment_pv(p, rho));
  }
  double end = 0;
  for (const auto& p : st.paths) end = std::max(end, p.tau);
  const auto n_years = static_cast<std::size_t>(std::ceil(end - 1e-9));
  const auto h_tau = histogram(stopped_tau, 0, static_cast<double>(std::max<std::size_t>(n_years, 1)),
                               std::max<std::size_t>(n_years, 1));
  j["histograms"]["tau"] = {{"lo", h_tau.lo}, {"hi", h_tau.hi}, {"counts", h_tau.counts},
                            {"censored", st.n_censored}};
  auto hist_json = [](const std::vector<double>& v) {
    const auto s = summarize(v);
    const auto h = histogram(v, s.min, s.max, 20);
    return json{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
  };
  j["histograms"]["annual_annuity"] = hist_json(payments);
  j["histograms"]["annuity_pv"] = hist_json(payment_pv);
  return j;
}

json to_json(const VerificationReport& rep) {
  json arr = json::array();
  for (const auto& c : rep.checks)
    arr.push_back({{"check", c.check},
                   {"max_residual", number(c.max_residual)},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed}});
  return arr;
}

json to_json(const RunManifest& m) {
  return {{"tool", "annuity"},
          {"tool_version", tool_version()},
          {"schema_version", 1},
          {"seed", m.seed},
          {"params", to_json(m.params)},
          {"derived", to_json(m.constants)},
          {"solution", to_json(m.solution)},
          {"config", m.config},
          {"outputs", m.outputs}};
}

void write_paths_csv(std::ostream& out, const std::vector<PathRecord>& paths) {
  out << kPathCsvHeader << '\n';
  for (const auto& p : paths) {
    out << p.path << ',' << format_number(p.tau) << ',' << (p.censored ? 1 : 0) << ','
        << format_number(p.x_tau) << ',' << format_number(p.annual_annuity) << ','
        << format_number(p.avg_consumption) << ',' << format_number(p.avg_labor_income) << ','
        << format_number(p.pv_annuity) << ',' << format_number(p.pv_consumption) << ','
        << format_number(p.pv_labor) << ',' << format_number(p.net_wealth) << '\n';
  }
}

}  // namespace annuity
