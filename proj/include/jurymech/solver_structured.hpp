#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "jurymech/mechanisms.hpp"
#include "jurymech/model.hpp"
#include "jurymech/solver_lp.hpp"

namespace jurymech {

/// Lagrangian objective v(k) + mu (b(k) - b(k-1)) of the relaxed program and its
/// normalization phi(k) = values(k) / Bin_beta(k, n+1).
template <typename Scalar>
struct VirtualUtility {
  Scalar mu;
  Vector<Scalar> values;
  Vector<Scalar> phi;
  Scalar m_alpha;  // expected a-signal count in state alpha, p_alpha (n+1)
  Scalar m_beta;
};

template <typename Scalar>
VirtualUtility<Scalar> virtual_utility(const BasicModelParams<Scalar>& params, const Scalar& mu) {
  if (mu < Scalar(0)) throw std::invalid_argument("Lagrange multiplier must be non-negative");
  const auto lp = build_lp(params);
  VirtualUtility<Scalar> vu{mu, lp.v + mu * lp.db, Vector<Scalar>(lp.size()),
                            params.p_alpha() * Scalar(params.agents()),
                            params.p_beta() * Scalar(params.agents())};
  // Closed form: (1 + mu (1 - k/m_alpha)) L(k) - (t_P + mu t_J (1 - k/m_beta)).
  for (int k = 0; k < lp.size(); ++k) {
    const Scalar kk(k);
    vu.phi[k] = (Scalar(1) + mu * (Scalar(1) - kk / vu.m_alpha)) * likelihood(params, k) -
                (params.t_P() + mu * params.t_J() * (Scalar(1) - kk / vu.m_beta));
  }
  return vu;
}

enum class BoundarySide { Lower, Upper };

/// Boundary probability that makes IC-b bind for the interval [lower, upper]
/// when the other boundary and the interior are at 1. std::nullopt when the
/// equation has no solution in (0, 1].
template <typename Scalar>
std::optional<Scalar> boundary_probability(const LPInstance<Scalar>& lp, int agent_cut, int lower,
                                           int upper, BoundarySide side) {
  if (lower < agent_cut || lower > upper || upper >= lp.size())
    throw std::invalid_argument("boundary_probability requires k_J <= lower <= upper <= n+1");
  Scalar num, den;
  if (side == BoundarySide::Lower) {
    // b(upper) = x b(lower-1) + (1-x) b(lower)
    num = lp.b_at(upper) - lp.b_at(lower);
    den = lp.b_at(lower - 1) - lp.b_at(lower);
  } else {
    // x b(upper) + (1-x) b(upper-1) = b(lower-1)
    num = lp.b_at(lower - 1) - lp.b_at(upper - 1);
    den = lp.b_at(upper) - lp.b_at(upper - 1);
  }
  if (is_exact_v<Scalar> ? den == Scalar(0) : abs_value(den) <= Scalar(1e-12)) return std::nullopt;
  Scalar value = num / den;
  if constexpr (!is_exact_v<Scalar>) {
    if (value > 1.0 && value <= 1.0 + 1e-12) value = 1.0;
  }
  if (!(value > Scalar(0)) || value > Scalar(1)) return std::nullopt;
  return value;
}

template <typename Scalar>
std::optional<Scalar> boundary_probability(const BasicModelParams<Scalar>& params, int lower,
                                           int upper, BoundarySide side) {
  return boundary_probability(build_lp(params), agent_cutoff(params), lower, upper, side);
}

/// Interval mechanism with support [lower, upper] and the given boundary probabilities.
template <typename Scalar>
VotingMechanism<Scalar> interval_mechanism(int tallies, int lower, int upper, const Scalar& lower_prob,
                                           const Scalar& upper_prob) {
  VotingMechanism<Scalar> x = VotingMechanism<Scalar>::Zero(tallies);
  for (int k = lower; k <= upper; ++k) x[k] = Scalar(1);
  x[upper] = upper_prob;
  x[lower] = lower_prob;
  return x;
}

/// Outcome of checking IC-a for an interval mechanism whose IC-b binds, once
/// through the w-decomposition of a(k) and once directly.
template <typename Scalar>
struct IntervalICaCheck {
  bool applicable = false;  // hypotheses hold: interval shape, IC-b binding, boundary case (i) or (ii)
  int boundary_case = 0;    // 1: upper boundary at one; 2: lower boundary at one above k_J
  Scalar slack_formula{0};
  Scalar slack_direct{0};
  bool agree = false;

  bool passed() const {
    return applicable && agree && slack_formula <= Tolerance<Scalar>::feasibility() &&
           slack_direct <= Tolerance<Scalar>::feasibility();
  }
};

template <typename Scalar>
IntervalICaCheck<Scalar> lemma_interval_ic_a_check(const BasicModelParams<Scalar>& params,
                                                   const VotingMechanism<Scalar>& x) {
  IntervalICaCheck<Scalar> out;
  const auto lp = build_lp(params);
  const auto ic = ic_report(lp, x);
  out.slack_direct = ic.ic_a_lhs;
  const auto shape = classify(x);
  if (!shape || shape->kind != IntervalShape::Kind::Interval || ic.verdict_b != Verdict::Binding)
    return out;
  const int kj = agent_cutoff(params);
  const int lo = shape->lower;
  const int hi = shape->upper;
  const Scalar c = params.p_beta() / (Scalar(1) - params.p_beta());
  auto w = [&](int k) { return agent_margin_ratio(params, k); };
  Scalar scale;
  if (shape->upper_prob == 1.0 && lo >= kj) {
    out.boundary_case = 1;
    const Scalar xl = x[lo];
    const Scalar wh = w(hi);
    out.slack_formula = -c * wh *
                        (xl * lp.b_at(lo - 1) * (w(lo - 1) / wh - Scalar(1)) +
                         (Scalar(1) - xl) * lp.b_at(lo) * (w(lo) / wh - Scalar(1)));
    scale = c * abs_value(wh);
  } else if (shape->lower_prob == 1.0 && lo > kj) {
    out.boundary_case = 2;
    const Scalar xh = x[hi];
    const Scalar wl = w(lo - 1);
    out.slack_formula = c * wl *
                        (xh * lp.b_at(hi) * (w(hi) / wl - Scalar(1)) +
                         (Scalar(1) - xh) * lp.b_at(hi - 1) * (w(hi - 1) / wl - Scalar(1)));
    scale = c * abs_value(wl);
  } else {
    return out;
  }
  out.applicable = true;
  // The two routes differ by c w (IC-b residual), which is within tolerance when IC-b binds.
  const Scalar gap = abs_value(Scalar(out.slack_formula - out.slack_direct));
  out.agree = gap <= Tolerance<Scalar>::feasibility() * (Scalar(1) + scale);
  return out;
}

/// Optimal mechanism by enumerating interval candidates: the zero mechanism,
/// every integral interval [lo, hi] with k_J <= lo <= k_P <= hi, and for each such
/// pair the two candidates with one fractional boundary set so that IC-b binds.
/// IC feasibility of each candidate is checked directly.
template <typename Scalar>
SolveResult<Scalar> solve_structured(const BasicModelParams<Scalar>& params) {
  const auto lp = build_lp(params);
  const int kj = agent_cutoff(params);
  const int kp = principal_cutoff(params);
  const int size = params.tallies();
  if (kj == kp) return describe_solution(lp, cutoff_mechanism<Scalar>(size, kp));

  struct Candidate {
    VotingMechanism<Scalar> x;
    Scalar objective;
    Scalar mass;
  };
  std::vector<Candidate> feasible;
  auto consider = [&](VotingMechanism<Scalar> x) {
    if (!ic_report(lp, x).satisfied()) return;
    Scalar objective = lp.v.dot(x);
    Scalar mass = x.sum();
    feasible.push_back({std::move(x), std::move(objective), std::move(mass)});
  };

  consider(VotingMechanism<Scalar>::Zero(size));
  for (int lo = kj; lo <= kp; ++lo) {
    for (int hi = std::max(lo, kp); hi < size; ++hi) {
      consider(interval_mechanism<Scalar>(size, lo, hi, Scalar(1), Scalar(1)));
      if (auto p = boundary_probability(lp, kj, lo, hi, BoundarySide::Lower))
        consider(interval_mechanism<Scalar>(size, lo, hi, *p, Scalar(1)));
      if (auto p = boundary_probability(lp, kj, lo, hi, BoundarySide::Upper))
        consider(interval_mechanism<Scalar>(size, lo, hi, Scalar(1), *p));
    }
  }

  Scalar best = feasible.front().objective;
  for (const auto& c : feasible)
    if (c.objective > best) best = c.objective;
  const Scalar tie = Tolerance<Scalar>::tie();
  const Candidate* chosen = nullptr;
  for (const auto& c : feasible) {
    if (c.objective < best - tie) continue;
    if (!chosen || c.mass > chosen->mass) chosen = &c;
  }
  std::optional<VotingMechanism<Scalar>> alternate;
  for (const auto& c : feasible) {
    if (c.objective < best - tie || same_mechanism(c.x, chosen->x)) continue;
    if (!alternate || c.mass == Scalar(0)) alternate = c.x;
  }
  return describe_solution(lp, chosen->x, alternate);
}

}  // namespace jurymech
