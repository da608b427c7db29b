// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "instances.hpp"
#include "oracles.hpp"

#include "jurymech/game.hpp"
#include "jurymech/io.hpp"
#include "jurymech/solver_lp.hpp"
#include "jurymech/solver_structured.hpp"
#include "jurymech/theory.hpp"

using namespace jurymech;

namespace {

// Tolerances and sample sizes, fixed before any run.
constexpr double kFloatError = 1e-10;
constexpr double kSolverGap = 1e-8;
constexpr double kFeasibility = 1e-9;
constexpr double kThresholdTolerance = 1e-4;
constexpr double kSymmetrizationRelative = 1e-12;
constexpr double kStandardErrors = 4.0;
constexpr int kRandomInstances = 100;
constexpr int kConflictedInstances = 50;
constexpr int kMinNonVacuous = 10;
constexpr int kGamePairs = 1000;
constexpr std::uint64_t kTrials = 1000000;
constexpr int kDirectMechanisms = 20;
constexpr double kOracleSeconds = 10.0;

constexpr std::uint64_t kInstanceSeed = 1;
constexpr std::uint64_t kConflictSeed = 2;
constexpr std::uint64_t kGameSeed = 3;
constexpr std::uint64_t kSimulationSeed = 42;
constexpr std::uint64_t kDirectSeed = 4;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<ModelParams> random_instances() {
  InstanceGenerator gen(kInstanceSeed);
  std::vector<ModelParams> out;
  for (int i = 0; i < kRandomInstances; ++i) out.push_back(gen.next());
  return out;
}

bool in_box(const Vector<double>& x) {
  return x.minCoeff() >= -kFeasibility && x.maxCoeff() <= 1.0 + kFeasibility;
}

bool exactly_nonmonotone(const Vector<Rational>& x) {
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k)
    if (x[k + 1] < x[k]) return true;
  return false;
}

void criterion_1() {
  const auto p = fixtures::f2();
  const auto e = fixtures::f2_exact();
  Vector<Rational> target(3);
  target << Rational(0), Rational(1, 2), Rational(1);
  bool ok = true;
  for (const auto& r : {solve_full(e), solve_structured(e)})
    ok = ok && r.x == target && r.objective == Rational(1, 6);
  double worst = 0.0;
  for (const auto& r : {solve_full(p), solve_structured(p)}) {
    worst = std::max(worst, std::abs(r.objective - 1.0 / 6.0));
    worst = std::max(worst, (r.x - to_double_vector(target)).cwiseAbs().maxCoeff());
  }
  ok = ok && worst < kFloatError;
  report(1, ok, "F2 x = (0, 1/2, 1), objective 1/6 exact in rational mode; float error " + fmt("%.3g", worst));
}

void criterion_2() {
  const auto p = fixtures::f9();
  const auto e = fixtures::f9_exact();
  const int kj = agent_cutoff(e), kp = principal_cutoff(e);
  const bool hat_exact = agent_preferred_lowered(e)[3] == Rational(4, 5);
  const double t_bar = nonmonotonicity_threshold(p).t_bar_P;
  const auto opt = solve_structured(p);
  const auto full = solve_full(p);
  const auto shape = classify(opt.x);
  const bool interval = shape && shape->kind == IntervalShape::Kind::Interval;
  const bool nonmonotone = interval && (opt.x[9] < 1.0 - kFeasibility || shape->upper < 9);
  const bool ok = kj == 3 && kp == 5 && hat_exact && std::abs(t_bar - 0.24999) < kThresholdTolerance &&
                  is_responsive(opt.x) && interval && nonmonotone &&
                  std::abs(full.objective - opt.objective) < kSolverGap;
  report(2, ok,
         "F9 k_J=" + std::to_string(kj) + " k_P=" + std::to_string(kp) + ", lowered x(3)=4/5 " +
             (hat_exact ? "exact" : "MISMATCH") + fmt(", t_bar_P=%.10f", t_bar) + fmt(", x(9)=%.6f", opt.x[9]) +
             (nonmonotone ? ", non-monotone interval" : ", not a non-monotone interval"));
}

void criteria_3_4(const std::vector<ModelParams>& instances) {
  const auto start = std::chrono::steady_clock::now();
  double worst_gap = 0.0;
  int infeasible = 0;
  std::vector<std::pair<SolveResult<double>, SolveResult<double>>> results;
  for (const auto& p : instances) {
    auto s = solve_structured(p);
    auto f = solve_full(p);
    worst_gap = std::max(worst_gap, std::abs(s.objective - f.objective));
    const auto lp = build_lp(p);
    // simplex row feasibility, measured against the row scale
    const double scale_a = lp.da.cwiseAbs().sum(), scale_b = lp.db.cwiseAbs().sum();
    if (!in_box(s.x) || lp.da.dot(s.x) > kFeasibility * scale_a || lp.db.dot(s.x) < -kFeasibility * scale_b)
      ++infeasible;
    results.emplace_back(std::move(s), std::move(f));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(3, worst_gap < kSolverGap && infeasible == 0 && seconds < kOracleSeconds,
         std::to_string(instances.size()) + " instances, max |structured - simplex| = " + fmt("%.3g", worst_gap) +
             ", infeasible structured solutions " + std::to_string(infeasible) + fmt(", %.2f s", seconds));

  int checked = 0, bad = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& p = instances[i];
    const int kj = agent_cutoff(p), kp = principal_cutoff(p);
    std::vector<Vector<double>> optima = results[i].first.optima();
    for (const auto& x : results[i].second.optima()) optima.push_back(x);
    for (const auto& x : optima) {
      ++checked;
      const auto shape = classify(x);
      if (!shape) {
        ++bad;
        continue;
      }
      if (shape->kind == IntervalShape::Kind::Interval &&
          !(kj <= shape->lower && shape->lower <= kp && kp <= shape->upper))
        ++bad;
    }
  }
  report(4, bad == 0,
         std::to_string(checked) + " optimal mechanisms from both solvers, " + std::to_string(bad) +
             " not Zero or Interval with k_J <= lower <= k_P <= upper");
}

void criterion_5() {
  InstanceGenerator gen(kConflictSeed);
  int vacuous = 0, active = 0, monotone = 0;
  for (int i = 0; i < kConflictedInstances; ++i) {
    const auto p = gen.next_conflicted_above_threshold();
    // Exact optima: downward steps can be far below double resolution.
    const auto r = solve_structured(to_rational(p));
    bool any_responsive = false;
    for (const auto& x : r.optima()) {
      if (x.minCoeff() == x.maxCoeff()) continue;
      any_responsive = true;
      if (!exactly_nonmonotone(x)) ++monotone;
    }
    any_responsive ? ++active : ++vacuous;
  }
  report(5, monotone == 0 && active >= kMinNonVacuous,
         std::to_string(kConflictedInstances) + " conflicted instances above t_bar_P: " + std::to_string(active) +
             " non-vacuous, " + std::to_string(vacuous) + " vacuous (zero optimum), " + std::to_string(monotone) +
             " monotone responsive optima");
}

void criterion_6(const std::vector<ModelParams>& instances) {
  const char* names[] = {lemma::kAgentPreferredStrict, lemma::kPrincipalPreferredIcB, lemma::kFirstBest,
                         lemma::kLoweredRaised,        lemma::kFractionalCount,       lemma::kMarginRatio,
                         lemma::kVirtualUtility};
  int failed = 0;
  std::string first_failure;
  for (const auto& p : instances) {
    const auto r = verify_lemmas(p);
    for (const char* name : names) {
      const auto& c = r.lemma_results.at(name);
      if (c.status == CheckStatus::Fail) {
        ++failed;
        if (first_failure.empty()) first_failure = std::string(name) + ": " + c.detail;
      }
    }
  }
  report(6, failed == 0,
         "checks 1-7 on " + std::to_string(instances.size()) + " instances, " + std::to_string(failed) +
             " failures" + (first_failure.empty() ? "" : " (" + first_failure + ")"));
}

void criterion_7(const std::vector<ModelParams>& instances) {
  std::vector<ModelParams> pool;
  for (const auto& p : instances)
    if (conflict_of_interest(p) && p.t_P() > nonmonotonicity_threshold(p).t_bar_P) pool.push_back(p);
  InstanceGenerator gen(kConflictSeed);
  for (int i = 0; i < kConflictedInstances; ++i) pool.push_back(gen.next_conflicted_above_threshold());
  int improved = 0;
  for (const auto& p : pool)
    if (default_improving_deviation(p).gain > 0.0) ++improved;
  const auto f2 = default_improving_deviation(fixtures::f2());
  const bool f2_worse = f2.gain < 0.0;
  report(7, improved == static_cast<int>(pool.size()) && f2_worse,
         std::to_string(improved) + "/" + std::to_string(pool.size()) +
             " instances above t_bar_P improved by the deviation; F2 change " + fmt("%.3g", f2.gain));
}

void criterion_8() {
  InstanceGenerator gen(kGameSeed);
  std::mt19937_64 rng(kGameSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0, binding = 0;
  for (int i = 0; i < kGamePairs; ++i) {
    const auto p = gen.next();
    Vector<double> x(p.tallies());
    for (auto& e : x) e = u(rng);
    const auto ic = ic_report(p, x);
    const auto g = deviation_gains(p, x);
    auto agrees = [&](Verdict v, double gain) {
      if (v == Verdict::Binding) {
        ++binding;
        return true;
      }
      return (v == Verdict::Strict) == (gain > 0.0);
    };
    if (!agrees(ic.verdict_a, g.gain_a) || !agrees(ic.verdict_b, g.gain_b)) ++mismatches;
  }

  bool mc_ok = true;
  std::string detail;
  for (const auto& p : {fixtures::f2(), fixtures::f9()}) {
    const auto x = solve_structured(p).x;
    const auto truthful = ReportingStrategy::truthful();
    const auto exact = expected_payoffs(p, x, truthful);
    const auto first = simulate(p, x, truthful, {kTrials, kSimulationSeed});
    const auto second = simulate(p, x, truthful, {kTrials, kSimulationSeed});
    const bool same = dump(simulation_report_to_json(first)) == dump(simulation_report_to_json(second));
    const double z_p = std::abs(first.principal_mean - exact.principal) / first.principal_se;
    const double z_a = std::abs(first.agent_mean - exact.agent) / first.agent_se;
    mc_ok = mc_ok && same && z_p < kStandardErrors && z_a < kStandardErrors;
    detail += fmt(" n+1=%.0f:", p.agents()) + fmt(" principal %.2f SE,", z_p) + fmt(" agent %.2f SE", z_a) +
              (same ? " reproducible;" : " NOT reproducible;");
  }
  report(8, mismatches == 0 && mc_ok,
         std::to_string(kGamePairs) + " pairs, " + std::to_string(mismatches) + " sign mismatches (" +
             std::to_string(binding) + " binding verdicts);" + detail);
}

void criterion_9() {
  std::mt19937_64 rng(kDirectSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < kDirectMechanisms; ++i) {
    const int n1 = 2 + static_cast<int>(rng() % 9);
    const double pb = 0.05 + 0.5 * u(rng);
    const double pa = pb + 0.1 + (0.85 - pb) * u(rng);
    const double prior = 0.2 + 0.6 * u(rng);
    const auto p = ModelParams::unvalidated(n1, prior, pa, pb, 0.5 + 2.0 * u(rng), 0.1 + 0.4 * u(rng));
    DirectMechanism d{n1, std::vector<double>(std::size_t{1} << n1)};
    for (auto& e : d.table) e = u(rng);
    const double direct = oracle::direct_payoff(p, d.table, n1);
    const double anonymous = principal_payoff(p, symmetrize(d)).v_units;
    worst = std::max(worst, std::abs(direct - anonymous) / std::max(std::abs(direct), std::abs(anonymous)));
  }
  report(9, worst < kSymmetrizationRelative,
         std::to_string(kDirectMechanisms) + " direct mechanisms, max relative payoff change " + fmt("%.3g", worst));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const auto instances = random_instances();
  criterion_1();
  criterion_2();
  criteria_3_4(instances);
  criterion_5();
  criterion_6(instances);
  criterion_7(instances);
  criterion_8();
  criterion_9();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d failure(s), %.1f s\n", failures, seconds);
  return failures == 0 ? 0 : 1;
}
