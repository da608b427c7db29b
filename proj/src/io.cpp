#include "jurymech/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jurymech {

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
    }
  }
  throw std::invalid_argument(std::string("field \"") + key + "\" must be a number or \"p/q\"");
}

void write_value(std::ostringstream& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* newline = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float:
      out << (std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null");
      break;
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        break;
      }
      out << "[" << newline;
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << "," << newline;
        first = false;
        out << pad;
        write_value(out, e, indent, depth + 1);
      }
      out << newline << close_pad << "]";
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        break;
      }
      out << "{" << newline;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << "," << newline;
        first = false;
        out << pad << Json(key).dump() << (indent > 0 ? ": " : ":");
        write_value(out, value, indent, depth + 1);
      }
      out << newline << close_pad << "}";
      break;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

ModelParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  if (!j.contains("agents") || !j.at("agents").is_number_integer())
    throw std::invalid_argument("field \"agents\" must be an integer");
  const int agents = j.at("agents").get<int>();
  const bool has_thresholds = j.contains("t_P") || j.contains("t_J");
  const bool has_payoffs =
      j.contains("V_alpha") || j.contains("V_beta") || j.contains("U_alpha") || j.contains("U_beta");
  if (has_thresholds == has_payoffs)
    throw std::invalid_argument("give exactly one of {t_P, t_J} or {V_alpha, V_beta, U_alpha, U_beta}");
  const double prior = number_field(j, "prior_alpha");
  const double pa = number_field(j, "p_alpha");
  const double pb = number_field(j, "p_beta");
  if (has_thresholds)
    return ModelParams::from_thresholds(agents, prior, pa, pb, number_field(j, "t_P"), number_field(j, "t_J"));
  return ModelParams::from_payoffs(agents, prior, pa, pb, number_field(j, "V_alpha"), number_field(j, "V_beta"),
                                   number_field(j, "U_alpha"), number_field(j, "U_beta"));
}

Json params_to_json(const ModelParams& params) {
  Json out;
  out["agents"] = params.agents();
  out["prior_alpha"] = params.prior_alpha();
  out["p_alpha"] = params.p_alpha();
  out["p_beta"] = params.p_beta();
  if (const auto& pay = params.payoffs()) {
    out["V_alpha"] = pay->V_alpha;
    out["V_beta"] = pay->V_beta;
    out["U_alpha"] = pay->U_alpha;
    out["U_beta"] = pay->U_beta;
  } else {
    out["t_P"] = params.t_P();
    out["t_J"] = params.t_J();
  }
  return out;
}

VotingMechanism<double> mechanism_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("x") || !j.at("x").is_array())
    throw std::invalid_argument("mechanism must be {\"agents\": int, \"x\": [...]}");
  const auto& arr = j.at("x");
  VotingMechanism<double> x(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number()) throw std::invalid_argument("mechanism entries must be numbers");
    x[static_cast<Eigen::Index>(k)] = arr[k].get<double>();
    if (x[k] < 0.0 || x[k] > 1.0) throw std::invalid_argument("mechanism entries must lie in [0,1]");
  }
  if (j.contains("agents") && j.at("agents").get<long>() + 1 != static_cast<long>(arr.size()))
    throw std::invalid_argument("mechanism length must equal agents + 1");
  return x;
}

Json mechanism_to_json(const VotingMechanism<double>& x) {
  Json out;
  out["agents"] = x.size() - 1;
  out["x"] = Json::array();
  for (double e : x) out["x"].push_back(e);
  return out;
}

DirectMechanism direct_mechanism_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.empty()) throw std::invalid_argument("direct mechanism must be a non-empty object");
  DirectMechanism d;
  d.agents = static_cast<int>(j.begin().key().size());
  if (d.agents < 2 || d.agents > kMaxDirectAgents)
    throw std::invalid_argument("direct mechanism profiles must have 2..20 entries");
  const std::size_t profiles = std::size_t{1} << d.agents;
  if (j.size() != profiles) throw std::invalid_argument("direct mechanism needs all 2^(n+1) profiles");
  d.table.assign(profiles, 0.0);
  std::vector<bool> seen(profiles, false);
  for (const auto& [key, value] : j.items()) {
    if (static_cast<int>(key.size()) != d.agents) throw std::invalid_argument("profile length mismatch: " + key);
    std::size_t index = 0;
    for (int i = 0; i < d.agents; ++i) {
      if (key[i] == 'a') index |= std::size_t{1} << i;
      else if (key[i] != 'b') throw std::invalid_argument("profiles use the alphabet {a, b}: " + key);
    }
    if (seen[index]) throw std::invalid_argument("duplicate profile " + key);
    seen[index] = true;
    d.table[index] = value.get<double>();
  }
  return d;
}

Json theory_report_to_json(const TheoryReport& report) {
  Json out;
  out["conflict"] = report.conflict;
  out["first_best_achievable"] = report.first_best_achievable;
  out["t_bar_P"] = report.t_bar_P ? Json(*report.t_bar_P) : Json(nullptr);
  out["c_prime"] = report.c_prime ? Json(*report.c_prime) : Json(nullptr);
  Json lemmas = Json::object();
  for (const auto& [name, check] : report.lemma_results) {
    Json c;
    c["pass"] = check.ok();
    c["status"] = to_string(check.status);
    c["detail"] = check.detail;
    Json values = Json::object();
    for (const auto& [k, v] : check.values) values[k] = v;
    c["values"] = values;
    lemmas[name] = c;
  }
  out["lemmas"] = lemmas;
  out["all_passed"] = report.all_passed();
  return out;
}

Json simulation_report_to_json(const SimulationReport& report) {
  Json out;
  out["trials"] = report.trials;
  out["seed"] = report.seed;
  out["principal_mean"] = report.principal_mean;
  out["principal_se"] = report.principal_se;
  out["agent_mean"] = report.agent_mean;
  out["agent_se"] = report.agent_se;
  return out;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string dump(const Json& j, int indent) {
  std::ostringstream out;
  write_value(out, j, indent, 0);
  return out.str();
}

}  // namespace jurymech
