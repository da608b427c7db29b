// jurymech: solve, verify, sweep and simulate optimal jury voting mechanisms.
//
// Exit codes: 0 success, 1 I/O error, 2 invalid input or violated assumption,
// 3 verification found a failing check.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jurymech/game.hpp"
#include "jurymech/io.hpp"
#include "jurymech/mechanisms.hpp"
#include "jurymech/model.hpp"
#include "jurymech/parallel.hpp"
#include "jurymech/solver_lp.hpp"
#include "jurymech/solver_structured.hpp"
#include "jurymech/theory.hpp"

using namespace jurymech;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCheckFailed = 3;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  write_text_file(out_path, text);
}

// --- solve ---------------------------------------------------------------

template <typename Scalar>
Json solve_with(const BasicModelParams<Scalar>& params, const std::string& solver, double* objective) {
  if (solver == "lp") {
    const auto r = solve_full(params);
    *objective = to_double(r.objective);
    return solve_result_to_json(r);
  }
  const auto r = solve_structured(params);
  *objective = to_double(r.objective);
  return solve_result_to_json(r);
}

template <typename Scalar>
Json solve_json(const BasicModelParams<Scalar>& params, const std::string& solver) {
  double obj = 0.0;
  if (solver != "both") return solve_with(params, solver, &obj);
  double structured_obj = 0.0, lp_obj = 0.0;
  Json out;
  out["structured"] = solve_with(params, "structured", &structured_obj);
  out["lp"] = solve_with(params, "lp", &lp_obj);
  out["objective_gap"] = std::abs(structured_obj - lp_obj);
  return out;
}

int cmd_solve(const std::string& config, const std::string& solver, const std::string& mode,
              const std::string& out) {
  const auto params = params_from_json(read_json_file(config));
  const Json result = mode == "rational" ? solve_json(to_rational(params), solver) : solve_json(params, solver);
  emit(out, dump(result) + "\n");
  return kExitOk;
}

// --- verify --------------------------------------------------------------

int cmd_verify(const std::string& config, std::uint64_t seed, int random_instances, const std::string& out) {
  std::vector<ModelParams> instances;
  if (!config.empty()) instances.push_back(params_from_json(read_json_file(config)));
  if (random_instances < 0) throw std::invalid_argument("--random-instances must be non-negative");
  InstanceGenerator gen(seed);
  for (int i = 0; i < random_instances; ++i) instances.push_back(gen.next());
  if (instances.empty()) throw std::invalid_argument("nothing to verify: give a config or --random-instances");

  std::vector<TheoryReport> reports(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) { reports[i] = verify_lemmas(instances[i]); });

  int passed = 0, failed = 0, vacuous = 0;
  Json list = Json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const auto& [name, check] : reports[i].lemma_results) {
      if (check.status == CheckStatus::Pass) ++passed;
      else if (check.status == CheckStatus::Fail) ++failed;
      else ++vacuous;
    }
    Json entry;
    entry["params"] = params_to_json(instances[i]);
    entry["report"] = theory_report_to_json(reports[i]);
    list.push_back(entry);
  }
  Json result;
  result["instances"] = list;
  Json summary;
  summary["instance_count"] = instances.size();
  summary["seed"] = seed;
  summary["passed"] = passed;
  summary["failed"] = failed;
  summary["vacuous"] = vacuous;
  summary["all_passed"] = failed == 0;
  result["summary"] = summary;
  emit(out, dump(result) + "\n");
  std::cerr << "verify: " << passed << " passed, " << failed << " failed, " << vacuous << " vacuous\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

// --- sweep ---------------------------------------------------------------

struct SweepSpec {
  std::string variable;
  std::vector<double> values;
  nlohmann::json base;
};

SweepSpec parse_sweep(const nlohmann::json& j) {
  static const std::vector<std::string> variables{"t_P", "t_J", "n_plus_1", "p_alpha", "p_beta", "prior_alpha"};
  SweepSpec spec;
  if (!j.is_object() || !j.contains("variable") || !j.contains("base"))
    throw std::invalid_argument("sweep spec needs \"variable\" and \"base\"");
  spec.variable = j.at("variable").get<std::string>();
  if (std::find(variables.begin(), variables.end(), spec.variable) == variables.end())
    throw std::invalid_argument("unknown sweep variable \"" + spec.variable + "\"");
  spec.base = j.at("base");
  if (spec.base.contains("V_alpha") && (spec.variable == "t_P" || spec.variable == "t_J")) {
    // Sweeping a threshold: restate the base in threshold form.
    auto& b = spec.base;
    b["t_P"] = -b.at("V_beta").get<double>() / b.at("V_alpha").get<double>();
    b["t_J"] = -b.at("U_beta").get<double>() / b.at("U_alpha").get<double>();
    for (const char* key : {"V_alpha", "V_beta", "U_alpha", "U_beta"}) b.erase(key);
  }

  if (j.contains("values")) {
    spec.values = j.at("values").get<std::vector<double>>();
  } else if (j.contains("grid")) {
    const auto& g = j.at("grid");
    const double start = g.at("start").get<double>();
    const double stop = g.at("stop").get<double>();
    const int steps = g.at("steps").get<int>();
    const std::string scale = g.value("scale", "linear");
    if (scale != "linear" && scale != "log") throw std::invalid_argument("grid scale must be linear or log");
    if (scale == "log" && (start <= 0.0 || stop <= 0.0)) throw std::invalid_argument("log grid needs positive ends");
    for (int i = 0; i < steps; ++i) {
      const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
      spec.values.push_back(scale == "log" ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                                           : start + f * (stop - start));
    }
  } else {
    throw std::invalid_argument("sweep spec needs \"values\" or \"grid\"");
  }
  if (spec.values.empty()) throw std::invalid_argument("sweep grid is empty");
  return spec;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* flag(bool b) { return b ? "true" : "false"; }

struct SweepRow {
  std::string line;
  bool responsive = false;
  bool monotone = true;
  bool valid = false;
};

SweepRow sweep_row(const SweepSpec& spec, double value) {
  SweepRow row;
  std::ostringstream line;
  line << format_double(value) << ",";
  try {
    nlohmann::json config = spec.base;
    if (spec.variable == "n_plus_1") {
      if (value != std::floor(value)) throw std::invalid_argument("n_plus_1 must be an integer");
      config["agents"] = static_cast<int>(value);
    } else {
      config[spec.variable] = value;
    }
    const auto params = params_from_json(config);
    const int kj = agent_cutoff(params);
    const int kp = principal_cutoff(params);
    const bool conflict = kj < kp;
    const auto result = solve_structured(params);
    const auto shape = classify(result.x);
    row.responsive = is_responsive(result.x);
    row.monotone = is_monotone(result.x);
    line << kj << "," << kp << "," << flag(conflict) << ",";
    if (conflict) line << format_double(nonmonotonicity_threshold(params).t_bar_P);
    line << "," << format_double(result.objective) << ",";
    if (shape && shape->kind == IntervalShape::Kind::Interval)
      line << shape->lower << "," << shape->upper << "," << format_double(shape->lower_prob) << ","
           << format_double(shape->upper_prob) << ",";
    else
      line << ",,,,";
    line << flag(row.monotone) << "," << flag(row.responsive) << "," << flag(result.binding_b) << ","
         << to_string(result.status);
    row.valid = true;
  } catch (const std::exception& e) {
    line << ",,,,,,,,,,,," << csv_quote(std::string("skipped: ") + e.what());
  }
  row.line = line.str();
  return row;
}

int cmd_sweep(const std::string& spec_path, const std::string& out) {
  const auto spec = parse_sweep(read_json_file(spec_path));
  std::vector<SweepRow> rows(spec.values.size());
  parallel_for(rows.size(), [&](std::size_t i) { rows[i] = sweep_row(spec, spec.values[i]); });

  std::ostringstream csv;
  csv << "variable_value,k_J,k_P,conflict,t_bar_P,objective,k_lo,k_hi,x_lo,x_hi,monotone,responsive,"
         "ic_b_binding,status\n";
  for (const auto& r : rows) csv << r.line << "\n";
  emit(out, csv.str());

  if (spec.variable == "t_P") {
    std::optional<double> onset;
    for (std::size_t i = 0; i < rows.size() && !onset; ++i)
      if (rows[i].valid && rows[i].responsive && !rows[i].monotone) onset = spec.values[i];
    std::cerr << "sweep: empirical non-monotone onset "
              << (onset ? format_double(*onset) : std::string("not reached")) << "\n";
  }
  return kExitOk;
}

// --- simulate ------------------------------------------------------------

int cmd_simulate(const std::string& config, const std::string& mechanism_path, std::int64_t trials,
                 std::uint64_t seed, const std::string& out) {
  if (trials < 1) throw std::invalid_argument("--trials must be at least 1");
  const auto params = params_from_json(read_json_file(config));
  const auto x = mechanism_from_json(read_json_file(mechanism_path));
  if (x.size() != params.tallies())
    throw std::invalid_argument("mechanism length " + std::to_string(x.size()) + " does not match agents+1 = " +
                                std::to_string(params.tallies()));
  const auto truthful = ReportingStrategy::truthful();
  const auto report = simulate(params, x, truthful, {static_cast<std::uint64_t>(trials), seed});
  const auto exact = expected_payoffs(params, x, truthful);
  Json result = simulation_report_to_json(report);
  result["principal_exact"] = exact.principal;
  result["agent_exact"] = exact.agent;
  emit(out, dump(result) + "\n");
  return kExitOk;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal voting mechanisms for a principal and a jury of informed agents"};
  app.require_subcommand(1);

  std::string config, mechanism, out, solver = "structured", mode = "float";
  std::uint64_t seed = 0;
  int random_instances = 0;
  std::int64_t trials = 1000000;

  auto* solve = app.add_subcommand("solve", "Optimal mechanism for one instance");
  solve->add_option("config", config, "Model parameters (JSON)")->required();
  solve->add_option("--solver", solver)->check(CLI::IsMember({"structured", "lp", "both"}));
  solve->add_option("--mode", mode)->check(CLI::IsMember({"float", "rational"}));
  solve->add_option("--out", out, "Output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check structural properties on instances");
  verify->add_option("config", config, "Model parameters (JSON)");
  verify->add_option("--seed", seed);
  verify->add_option("--random-instances", random_instances);
  verify->add_option("--out", out);

  std::string spec_path;
  auto* sweep = app.add_subcommand("sweep", "Solve across a one-parameter grid, write CSV");
  sweep->add_option("spec", spec_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--out", out);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo play under truthful reporting");
  sim->add_option("config", config)->required();
  sim->add_option("mechanism", mechanism)->required();
  sim->add_option("--trials", trials);
  sim->add_option("--seed", seed);
  sim->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (solve->parsed()) return guarded([&] { return cmd_solve(config, solver, mode, out); });
  if (verify->parsed()) return guarded([&] { return cmd_verify(config, seed, random_instances, out); });
  if (sweep->parsed()) return guarded([&] { return cmd_sweep(spec_path, out); });
  return guarded([&] { return cmd_simulate(config, mechanism, trials, seed, out); });
}
