#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "annuity/simulator.hpp"
#include "annuity/verification.hpp"

namespace annuity {

std::string tool_version();

// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_number(double v);

nlohmann::json to_json(const ModelParams& params);
// Requires exactly the thirteen parameter keys. Throws ValidationError.
ModelParams params_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DerivedConstants& dc);
// x_star and y_star are omitted in the ruined regime.
nlohmann::json to_json(const DualSolution& sol);
nlohmann::json to_json(const PolicyPoint& pt);
nlohmann::json to_json(const SimulationConfig& cfg);
nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const CohortStats& stats, double rho);
nlohmann::json to_json(const VerificationReport& rep);

struct RunManifest {
  ModelParams params;
  DerivedConstants constants;
  DualSolution solution;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};
nlohmann::json to_json(const RunManifest& m);

inline constexpr const char* kPathCsvHeader =
    "path,tau,censored,x_tau,annual_annuity,avg_consumption,avg_labor_income,pv_annuity,"
    "pv_consumption,pv_labor,net_wealth";

void write_paths_csv(std::ostream& out, const std::vector<PathRecord>& paths);

}  // namespace annuity
