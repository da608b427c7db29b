#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "jurymech/game.hpp"
#include "jurymech/mechanisms.hpp"
#include "jurymech/model.hpp"
#include "jurymech/solver_lp.hpp"
#include "jurymech/theory.hpp"

namespace jurymech {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"agents", "prior_alpha", "p_alpha", "p_beta"} plus exactly one of
/// {"t_P", "t_J"} or {"V_alpha", "V_beta", "U_alpha", "U_beta"}. Numeric fields
/// may also be given as "p/q" strings.
ModelParams params_from_json(const nlohmann::json& j);
Json params_to_json(const ModelParams& params);

/// {"agents": int, "x": [...]}; agents must equal len(x) - 1.
VotingMechanism<double> mechanism_from_json(const nlohmann::json& j);
Json mechanism_to_json(const VotingMechanism<double>& x);

/// Map from report strings over {a, b} of length n+1 to probabilities.
DirectMechanism direct_mechanism_from_json(const nlohmann::json& j);

Json theory_report_to_json(const TheoryReport& report);
Json simulation_report_to_json(const SimulationReport& report);

/// 17 significant digits.
std::string format_double(double value);

/// JSON text with fixed key order and 17-significant-digit floats.
std::string dump(const Json& j, int indent = 2);

template <typename Scalar>
Json solve_result_to_json(const SolveResult<Scalar>& r) {
  auto vector_json = [](const VotingMechanism<Scalar>& x) {
    Json arr = Json::array();
    for (const auto& e : x) arr.push_back(to_double(e));
    return arr;
  };
  Json out;
  out["x"] = vector_json(r.x);
  out["objective"] = to_double(r.objective);
  out["binding_a"] = r.binding_a;
  out["binding_b"] = r.binding_b;
  out["status"] = to_string(r.status);
  out["fractional_indices"] = r.fractional_indices;
  if (r.alternate) out["alternate"] = vector_json(*r.alternate);
  if constexpr (is_exact_v<Scalar>) {
    Json exact = Json::array();
    for (const auto& e : r.x) exact.push_back(to_string(e));
    out["x_exact"] = exact;
    out["objective_exact"] = to_string(r.objective);
  }
  return out;
}

}  // namespace jurymech
