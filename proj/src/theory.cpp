#include "jurymech/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jurymech/solver_lp.hpp"
#include "jurymech/solver_structured.hpp"

namespace jurymech {

namespace {

constexpr double kGeneratorMargin = 1e-6;

void require_conflict(const ModelParams& params) {
  if (!conflict_of_interest(params))
    throw std::domain_error("no conflict of interest: k_J == k_P");
}

std::string describe(const Vector<double>& x) {
  std::ostringstream out;
  out << "(";
  for (int k = 0; k < x.size(); ++k) out << (k ? ", " : "") << x[k];
  out << ")";
  return out.str();
}

LemmaCheck verdict(bool ok, std::string detail) {
  return LemmaCheck{ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail), {}};
}

bool exactly_monotone(const Vector<Rational>& x) {
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k)
    if (x[k + 1] < x[k]) return false;
  return true;
}

bool exactly_responsive(const Vector<Rational>& x) {
  for (Eigen::Index k = 1; k < x.size(); ++k)
    if (x[k] != x[0]) return true;
  return false;
}

LemmaCheck vacuous(std::string detail) { return LemmaCheck{CheckStatus::Vacuous, std::move(detail), {}}; }

template <typename Scalar>
bool strictly_decreasing(const std::vector<Scalar>& w, int from, int to) {
  for (int k = from; k < to; ++k)
    if (!(w[k + 1] < w[k])) return false;
  return true;
}

// Near-indifference with the generator's wider margin.
bool near_generator_indifference(const ModelParams& p, double t) {
  for (int k = 0; k <= p.agents(); ++k) {
    const double l = likelihood(p, k);
    if (std::abs(l - t) <= kGeneratorMargin * std::max(l, t)) return true;
  }
  const double preimage = (std::log(t) - log_likelihood(p, 0.0)) / log_likelihood_step(p);
  return std::abs(preimage - std::round(preimage)) <= kGeneratorMargin;
}

}  // namespace

NonmonotonicityThreshold nonmonotonicity_threshold(const ModelParams& params) {
  require_conflict(params);
  const int kj = agent_cutoff(params);
  const int n1 = params.agents();
  const int n = params.others();
  const double pb = params.p_beta();
  const double tj = params.t_J();
  const double frac = static_cast<double>(kj) / n1;
  const double top = likelihood(params, n) - tj;
  const double c_prime = pb / (1.0 - pb) * (1.0 - frac) * (likelihood(params, kj) - tj) / top -
                         frac * (likelihood(params, kj - 1) - tj) / top;
  // L(n+1) - (L(n+1) - L(k_J)) / (1 + c') rearranged to avoid cancellation.
  const double t_bar = (c_prime * likelihood(params, n1) + likelihood(params, kj)) / (1.0 + c_prime);
  return {t_bar, c_prime};
}

namespace {

struct DeviationPlan {
  VotingMechanism<double> lowered;
  int kj;
  int top;
  double db_kj;
  double db_top;
};

DeviationPlan plan_deviation(const ModelParams& params, const LPInstance<double>& lp) {
  require_conflict(params);
  DeviationPlan plan{agent_preferred_lowered(params), agent_cutoff(params), params.agents(), 0.0, 0.0};
  if (plan.kj >= plan.top) throw std::domain_error("deviation requires k_J < n+1");
  plan.db_kj = lp.db[plan.kj];
  plan.db_top = lp.db[plan.top];
  return plan;
}

VotingMechanism<double> apply_deviation(const DeviationPlan& plan, double delta) {
  VotingMechanism<double> y = plan.lowered;
  y[plan.kj] -= delta / plan.db_kj;
  y[plan.top] += delta / plan.db_top;
  return y;
}

}  // namespace

double max_admissible_delta(const ModelParams& params) {
  const auto lp = build_lp(params);
  const auto plan = plan_deviation(params, lp);
  // db(k_J) > 0 > db(n+1): both coordinates decrease.
  double bound = std::min(plan.lowered[plan.kj] * plan.db_kj, -plan.db_top);
  const double rate = -lp.da[plan.kj] / plan.db_kj + lp.da[plan.top] / plan.db_top;
  if (rate > 0.0) bound = std::min(bound, -lp.da.dot(plan.lowered) / rate);
  return bound;
}

VotingMechanism<double> improving_deviation(const ModelParams& params, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const auto lp = build_lp(params);
  const auto plan = plan_deviation(params, lp);
  auto y = apply_deviation(plan, delta);
  const bool in_box = y.minCoeff() >= 0.0 && y.maxCoeff() <= 1.0;
  if (!in_box || ic_report(lp, y).verdict_a != Verdict::Strict) {
    const double max_delta = max_admissible_delta(params);
    std::ostringstream msg;
    msg << "delta " << delta << " too large; reduce below " << max_delta;
    throw DeltaTooLargeError(msg.str(), max_delta);
  }
  return y;
}

DeviationResult default_improving_deviation(const ModelParams& params) {
  const auto lp = build_lp(params);
  const auto plan = plan_deviation(params, lp);
  double delta = 1e-4 * std::min(std::abs(plan.db_kj), std::abs(plan.db_top));
  for (int halvings = 0; halvings <= 60; ++halvings, delta *= 0.5) {
    try {
      auto y = improving_deviation(params, delta);
      const double gain = delta * (-lp.v[plan.kj] / plan.db_kj + lp.v[plan.top] / plan.db_top);
      return DeviationResult{std::move(y), delta, gain, halvings};
    } catch (const DeltaTooLargeError&) {
    }
  }
  throw std::runtime_error("no admissible delta after 60 halvings");
}

std::vector<double> multiplier_grid() {
  std::vector<double> grid;
  grid.reserve(1001);
  for (int i = 0; i <= 1000; ++i) grid.push_back(i / 100.0);
  return grid;
}

bool nonnegative_set_is_interval(const Vector<double>& values) {
  int first = -1, last = -1;
  for (int k = 0; k < values.size(); ++k) {
    if (values[k] >= 0.0) {
      if (first < 0) first = k;
      last = k;
    }
  }
  for (int k = first + 1; k < last; ++k)
    if (values[k] < 0.0) return false;
  return true;
}

TheoryReport verify_lemmas(const ModelParams& params) {
  TheoryReport report;
  auto& checks = report.lemma_results;
  const auto lp = build_lp(params);
  const int kj = agent_cutoff(params);
  const int kp = principal_cutoff(params);
  const int n1 = params.agents();
  report.conflict = kj < kp;
  report.first_best_achievable = !report.conflict;
  std::optional<NonmonotonicityThreshold> threshold;
  if (report.conflict) {
    threshold = nonmonotonicity_threshold(params);
    report.t_bar_P = threshold->t_bar_P;
    report.c_prime = threshold->c_prime;
  }

  const auto full = solve_full(params);
  const auto relaxed = solve_relaxed(params);
  const auto structured = solve_structured(params);

  {
    const auto r = ic_report(lp, agent_preferred(params));
    auto c = verdict(r.verdict_a == Verdict::Strict && r.verdict_b == Verdict::Strict,
                     "agent-preferred cutoff at k_J=" + std::to_string(kj));
    c.values = {{"ic_a_lhs", r.ic_a_lhs}, {"ic_b_lhs", r.ic_b_lhs}};
    checks[lemma::kAgentPreferredStrict] = c;
  }
  {
    const auto r = ic_report(lp, principal_preferred(params));
    const bool violates_b = r.verdict_b == Verdict::Violated;
    auto c = verdict(violates_b == report.conflict && r.verdict_a != Verdict::Violated,
                     std::string("principal-preferred ") + (violates_b ? "violates" : "satisfies") +
                         " IC-b; conflict=" + (report.conflict ? "true" : "false"));
    c.values = {{"ic_a_lhs", r.ic_a_lhs}, {"ic_b_lhs", r.ic_b_lhs}};
    checks[lemma::kPrincipalPreferredIcB] = c;
  }
  // The loss from a conflict, and the dip of a non-monotone optimum below 1, can
  // sit far below double resolution, so checks (3), (6), (8) and (9) run in
  // exact arithmetic.
  const auto exact = to_rational(params);
  const auto exact_lp = build_lp(exact);
  const auto exact_full = solve_full(exact);
  {
    const Rational first_best = exact_lp.v.tail(n1 + 1 - kp).sum();
    const Rational& optimum = exact_full.objective;
    const bool achieved = optimum == first_best;
    auto c = verdict(achieved == !report.conflict, "first-best value vs exact optimum");
    c.values = {{"first_best", to_double(first_best)},
                {"optimum", to_double(optimum)},
                {"gap", to_double(Rational(first_best - optimum))}};
    checks[lemma::kFirstBest] = c;
  }
  {
    const auto hat = ic_report(lp, agent_preferred_lowered(params));
    const auto check = ic_report(lp, agent_preferred_raised(params));
    // With k_J = n+1 the lowered mechanism degenerates to the zero mechanism.
    const Verdict hat_a = kj < n1 ? Verdict::Strict : Verdict::Binding;
    const bool hat_ok = hat.verdict_a == hat_a && hat.verdict_b == Verdict::Binding;
    const bool check_ok = kj > 1 ? check.verdict_a == Verdict::Binding && check.verdict_b == Verdict::Strict
                                 : check.verdict_a == Verdict::Binding && check.verdict_b == Verdict::Binding;
    auto c = verdict(hat_ok && check_ok, "lowered: (strict a, binding b); raised: (binding a, " +
                                             std::string(kj > 1 ? "strict" : "binding") + " b)");
    c.values = {{"lowered_ic_a", hat.ic_a_lhs}, {"lowered_ic_b", hat.ic_b_lhs},
                {"raised_ic_a", check.ic_a_lhs}, {"raised_ic_b", check.ic_b_lhs}};
    checks[lemma::kLoweredRaised] = c;
  }
  {
    std::size_t relaxed_max = 0, full_max = 0;
    for (const auto& x : relaxed.optima())
      relaxed_max = std::max(relaxed_max, describe_solution(lp, x).fractional_indices.size());
    for (const auto& x : full.optima())
      full_max = std::max(full_max, describe_solution(lp, x).fractional_indices.size());
    auto c = verdict(relaxed_max <= 1 && full_max <= 2, "fractional entries at simplex vertices");
    c.values = {{"relaxed_fractional", static_cast<double>(relaxed_max)},
                {"full_fractional", static_cast<double>(full_max)}};
    checks[lemma::kFractionalCount] = c;
  }
  {
    std::vector<Rational> w(n1 + 1);
    for (int k = 0; k <= n1; ++k) w[k] = agent_margin_ratio(exact, k);
    bool signs = true;
    for (int k = 0; k <= n1; ++k) signs = signs && (k == kj - 1 ? w[k] < 0 : w[k] > 0);
    const bool decreasing = strictly_decreasing(w, 0, kj - 2) && strictly_decreasing(w, kj, n1);
    auto c = verdict(signs && decreasing, "w negative only at k_J-1, decreasing on each side");
    if (kj >= 1) c.values = {{"w_at_kJ_minus_1", to_double(w[kj - 1])}};
    checks[lemma::kMarginRatio] = c;
  }
  {
    bool ok = true;
    double failing_mu = -1.0;
    for (double mu : multiplier_grid()) {
      const auto vu = virtual_utility(params, mu);
      bool sign_match = true;
      for (int k = 0; k <= n1; ++k) {
        const double scale = likelihood(params, k) + params.t_P() + mu * params.t_J();
        if (std::abs(vu.phi[k]) > 1e-9 * scale && (vu.values[k] > 0.0) != (vu.phi[k] > 0.0))
          sign_match = false;
      }
      if (!sign_match || !nonnegative_set_is_interval(vu.values)) {
        ok = false;
        failing_mu = mu;
        break;
      }
    }
    auto c = verdict(ok, "{k : v(k) + mu db(k) >= 0} is an interval for mu in {0, 0.01, ..., 10}");
    if (!ok) c.values = {{"failing_mu", failing_mu}};
    checks[lemma::kVirtualUtility] = c;
  }
  {
    if (!report.conflict) {
      checks[lemma::kMonotoneOptimum] = vacuous("no conflict of interest");
    } else {
      const auto hat = agent_preferred_lowered(exact);
      const bool zero_optimal = exact_full.objective == 0;
      bool active = false, ok = true;
      for (const auto& x : exact_full.optima()) {
        if (!exactly_monotone(x) || !exactly_responsive(x)) continue;
        active = true;
        ok = ok && (x == hat || zero_optimal);
      }
      if (!active) {
        checks[lemma::kMonotoneOptimum] = vacuous("no monotone responsive optimum");
      } else {
        auto c = verdict(ok, "monotone responsive optimum equals lowered agent-preferred " +
                                 describe(to_double_vector(hat)));
        c.values = {{"objective", to_double(exact_full.objective)}};
        checks[lemma::kMonotoneOptimum] = c;
      }
    }
  }
  {
    if (!threshold) {
      checks[lemma::kNonmonotone] = vacuous("no conflict of interest");
    } else if (!(params.t_P() > threshold->t_bar_P)) {
      auto c = vacuous("t_P below the certificate threshold");
      c.values = {{"t_bar_P", threshold->t_bar_P}};
      checks[lemma::kNonmonotone] = c;
    } else {
      bool active = false, ok = true;
      for (const auto& x : exact_full.optima()) {
        if (!exactly_responsive(x)) continue;
        active = true;
        ok = ok && !exactly_monotone(x);
      }
      LemmaCheck c = active ? verdict(ok, "responsive optima above t_bar_P are non-monotone")
                            : vacuous("zero mechanism optimal");
      c.values = {{"t_bar_P", threshold->t_bar_P}, {"t_P", params.t_P()}};
      checks[lemma::kNonmonotone] = c;
    }
  }
  {
    bool ok = true;
    for (const auto* result : {&full, &structured}) {
      for (const auto& x : result->optima()) {
        const auto shape = classify(x);
        if (!shape) {
          ok = false;
        } else if (shape->kind == IntervalShape::Kind::Interval && is_responsive(to_double_vector(x))) {
          ok = ok && kj <= shape->lower && shape->lower <= kp && kp <= shape->upper;
        }
      }
    }
    checks[lemma::kIntervalStructure] =
        verdict(ok, "optima are zero or interval with k_J <= lower <= k_P <= upper");
  }
  {
    bool active = false, ok = true;
    for (const auto& x : structured.optima()) {
      if (!report.conflict || !is_responsive(to_double_vector(x))) continue;
      const auto check = lemma_interval_ic_a_check(params, x);
      if (!check.applicable) continue;
      active = true;
      ok = ok && check.passed();
    }
    checks[lemma::kIntervalICa] = active ? verdict(ok, "binding IC-b implies IC-a via w decomposition")
                                         : vacuous("no responsive optimum with binding IC-b");
  }
  {
    const double gap = std::abs(full.objective - structured.objective);
    auto c = verdict(gap < 1e-8, "structured enumeration vs simplex objective");
    c.values = {{"gap", gap}, {"objective", full.objective}};
    checks[lemma::kOracleAgreement] = c;
  }
  return report;
}

std::optional<double> empirical_nonmonotone_onset(const ModelParams& params,
                                                  const std::vector<double>& t_P_grid) {
  for (double t : t_P_grid) {
    try {
      const auto p = with_thresholds(params, t, params.t_J());
      const auto x = to_double_vector(solve_structured(p).x);
      if (is_responsive(x) && !is_monotone(x)) return t;
    } catch (const std::exception&) {
      continue;
    }
  }
  return std::nullopt;
}

double InstanceGenerator::uniform(double lo, double hi) {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

ModelParams InstanceGenerator::next() {
  for (;;) {
    const int n1 = 2 + static_cast<int>(rng_() % 14);
    const double pb = uniform(0.05, 0.6);
    const double pa = uniform(pb + 0.1, 0.95);
    const double prior = uniform(0.2, 0.8);
    const auto probe = ModelParams::unvalidated(n1, prior, pa, pb, 1.0, 1.0);
    const double lo = log_likelihood(probe, 0.0);
    const double hi = log_likelihood(probe, static_cast<double>(n1));
    double t1 = std::exp(uniform(lo, hi));
    double t2 = std::exp(uniform(lo, hi));
    if (t1 > t2) std::swap(t1, t2);
    if (near_generator_indifference(probe, t1) || near_generator_indifference(probe, t2)) continue;
    try {
      return ModelParams::from_thresholds(n1, prior, pa, pb, t2, t1);
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
}

ModelParams InstanceGenerator::next_conflicted_above_threshold() {
  for (;;) {
    const auto base = next();
    if (!conflict_of_interest(base)) continue;
    const double t_bar = nonmonotonicity_threshold(base).t_bar_P;
    const double hi = log_likelihood(base, static_cast<double>(base.agents()));
    const double t = std::exp(uniform(std::log(t_bar), hi));
    if (!(t > t_bar) || near_generator_indifference(base, t)) continue;
    try {
      return with_thresholds(base, t, base.t_J());
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
}

}  // namespace jurymech
