#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jurymech/model.hpp"
#include "jurymech/scalar.hpp"

namespace jurymech {

/// x(k), k = 0..n+1: probability of choosing A when k agents vote for A.
template <typename Scalar>
using VotingMechanism = Vector<Scalar>;

/// Bin(k, n) = C(n,k) p^k (1-p)^(n-k); zero outside 0 <= k <= n.
template <typename Scalar>
Scalar binom_pmf(const Scalar& p, int k, int n) {
  if (k < 0 || k > n) return Scalar(0);
  if constexpr (is_exact_v<Scalar>) {
    BigInt choose = 1;
    for (int i = 1; i <= k; ++i) choose = choose * (n - k + i) / i;
    return Scalar(choose) * ipow(p, k) * ipow(Scalar(Scalar(1) - p), n - k);
  } else {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
  }
}

/// Coefficients of the linear program over voting mechanisms. All vectors are
/// indexed by tally k = 0..n+1; da and db are first differences with a(-1) = b(-1) = 0.
template <typename Scalar>
struct LPInstance {
  Vector<Scalar> v;   // objective
  Vector<Scalar> a;   // a-signal incentive terms
  Vector<Scalar> b;   // b-signal incentive terms
  Vector<Scalar> da;  // IC-a': da . x <= 0
  Vector<Scalar> db;  // IC-b': db . x >= 0

  Eigen::Index size() const { return v.size(); }
  /// a(k) with a(-1) = 0.
  Scalar a_at(int k) const { return k < 0 ? Scalar(0) : a[k]; }
  /// b(k) with b(-1) = 0.
  Scalar b_at(int k) const { return k < 0 ? Scalar(0) : b[k]; }
};

template <typename Scalar>
LPInstance<Scalar> build_lp(const BasicModelParams<Scalar>& params) {
  const int n = params.others();
  const int size = params.tallies();
  const Scalar& pb = params.p_beta();
  const Scalar qb = Scalar(1) - pb;

  LPInstance<Scalar> lp;
  lp.v.resize(size);
  lp.a.resize(size);
  lp.b.resize(size);
  for (int k = 0; k < size; ++k) {
    const Scalar lk = likelihood(params, k);
    lp.v[k] = binom_pmf(pb, k, n + 1) * (lk - params.t_P());
    lp.a[k] = binom_pmf(pb, k, n) * pb * (likelihood(params, k + 1) - params.t_J());
    lp.b[k] = binom_pmf(pb, k, n) * qb * (lk - params.t_J());
  }
  lp.da.resize(size);
  lp.db.resize(size);
  for (int k = 0; k < size; ++k) {
    lp.da[k] = lp.a[k] - lp.a_at(k - 1);
    lp.db[k] = lp.b[k] - lp.b_at(k - 1);
  }
  return lp;
}

enum class Verdict { Strict, Binding, Violated };

template <typename Scalar>
struct ICReport {
  Scalar ic_a_lhs;  // satisfied iff <= 0
  Scalar ic_b_lhs;  // satisfied iff >= 0
  Verdict verdict_a = Verdict::Violated;
  Verdict verdict_b = Verdict::Violated;

  bool satisfied() const { return verdict_a != Verdict::Violated && verdict_b != Verdict::Violated; }
};

namespace detail {

template <typename Scalar>
Verdict classify_slack(const Scalar& slack, const Scalar& bound) {
  if (slack > bound) return Verdict::Strict;
  if (slack < -bound) return Verdict::Violated;
  return Verdict::Binding;
}

}  // namespace detail

/// Both IC forms, evaluated by summation by parts as sum_k c(k) (x(k) - x(k+1))
/// with x(n+2) = 0. This is the same linear form as da.x / db.x but avoids the
/// cancellation of the telescoping differences. In floating point the verdict
/// tolerance is tol * sum_k |c(k)| (|x(k) - x(k+1)| + f(k)), where f(k) = 1 when
/// x(k) or x(k+1) is fractional: entries of exactly 0 or 1 carry no rounding
/// error, fractional ones are trusted to tol.
template <typename Scalar>
ICReport<Scalar> ic_report(const LPInstance<Scalar>& lp, const VotingMechanism<Scalar>& x,
                           const Scalar& tol = Tolerance<Scalar>::feasibility()) {
  if (x.size() != lp.size())
    throw std::invalid_argument("mechanism length does not match the instance (expected n+2 entries)");
  const Eigen::Index size = x.size();
  VotingMechanism<Scalar> step = x;
  step.head(size - 1) -= x.tail(size - 1);
  ICReport<Scalar> r{lp.a.dot(step), lp.b.dot(step)};
  if constexpr (is_exact_v<Scalar>) {
    r.verdict_a = detail::classify_slack(-r.ic_a_lhs, tol);
    r.verdict_b = detail::classify_slack(r.ic_b_lhs, tol);
  } else {
    Vector<double> magnitude = step.cwiseAbs();
    auto fractional = [&](Eigen::Index k) { return k < size && x[k] != 0.0 && x[k] != 1.0; };
    for (Eigen::Index k = 0; k < size; ++k)
      if (fractional(k) || fractional(k + 1)) magnitude[k] += 1.0;
    r.verdict_a = detail::classify_slack(-r.ic_a_lhs, tol * lp.a.cwiseAbs().dot(magnitude));
    r.verdict_b = detail::classify_slack(r.ic_b_lhs, tol * lp.b.cwiseAbs().dot(magnitude));
  }
  return r;
}

template <typename Scalar>
ICReport<Scalar> ic_report(const BasicModelParams<Scalar>& params, const VotingMechanism<Scalar>& x) {
  return ic_report(build_lp(params), x);
}

template <typename Scalar>
struct PrincipalPayoff {
  Scalar v_units;
  std::optional<Scalar> payoff_units;  // present when raw payoffs were supplied
};

/// Expected principal payoff. v-units are the LP objective; payoff units rescale
/// by Pr(beta) V(alpha).
template <typename Scalar>
PrincipalPayoff<Scalar> principal_payoff(const BasicModelParams<Scalar>& params,
                                         const VotingMechanism<Scalar>& x) {
  const auto lp = build_lp(params);
  if (x.size() != lp.size()) throw std::invalid_argument("mechanism length mismatch");
  PrincipalPayoff<Scalar> out{lp.v.dot(x), std::nullopt};
  if (params.has_payoffs()) out.payoff_units = params.prior_beta() * params.payoffs()->V_alpha * out.v_units;
  return out;
}

/// x(k) = 1 for k >= cut, 0 below.
template <typename Scalar>
VotingMechanism<Scalar> cutoff_mechanism(int tallies, int cut) {
  VotingMechanism<Scalar> x(tallies);
  for (int k = 0; k < tallies; ++k) x[k] = k >= cut ? Scalar(1) : Scalar(0);
  return x;
}

template <typename Scalar>
VotingMechanism<Scalar> principal_preferred(const BasicModelParams<Scalar>& params) {
  return cutoff_mechanism<Scalar>(params.tallies(), principal_cutoff(params));
}

template <typename Scalar>
VotingMechanism<Scalar> agent_preferred(const BasicModelParams<Scalar>& params) {
  return cutoff_mechanism<Scalar>(params.tallies(), agent_cutoff(params));
}

/// Agent-preferred mechanism with x(k_J) lowered until IC-b binds.
template <typename Scalar>
VotingMechanism<Scalar> agent_preferred_lowered(const BasicModelParams<Scalar>& params) {
  const auto lp = build_lp(params);
  const int kj = agent_cutoff(params);
  auto x = cutoff_mechanism<Scalar>(params.tallies(), kj);
  x[kj] = lp.b_at(kj) / (lp.b_at(kj) - lp.b_at(kj - 1));
  return x;
}

/// Agent-preferred mechanism with x(k_J - 1) raised until IC-a binds; all ones when k_J = 1.
template <typename Scalar>
VotingMechanism<Scalar> agent_preferred_raised(const BasicModelParams<Scalar>& params) {
  const int kj = agent_cutoff(params);
  if (kj == 1) return VotingMechanism<Scalar>::Constant(params.tallies(), Scalar(1));
  const auto lp = build_lp(params);
  auto x = cutoff_mechanism<Scalar>(params.tallies(), kj);
  x[kj - 1] = lp.a_at(kj - 1) / (lp.a_at(kj - 1) - lp.a_at(kj - 2));
  return x;
}

/// w(k) = (L(k+1) - t_J) / (L(k) - t_J), the factor with a(k) = p_beta/(1-p_beta) b(k) w(k).
/// L(k) != t_J is guaranteed for valid parameters.
template <typename Scalar>
Scalar agent_margin_ratio(const BasicModelParams<Scalar>& params, int k) {
  return (likelihood(params, k + 1) - params.t_J()) / (likelihood(params, k) - params.t_J());
}

inline constexpr double kSnapTolerance = 1e-9;

/// Interval structure of a mechanism after snapping entries within tolerance of 0 or 1.
struct IntervalShape {
  enum class Kind { Zero, Interval };
  Kind kind = Kind::Zero;
  int lower = 0;
  int upper = -1;
  double lower_prob = 0.0;
  double upper_prob = 0.0;
  Vector<double> raw;
  Vector<double> snapped;

  bool responsive_interval() const { return kind == Kind::Interval; }
};

inline Vector<double> snap(const Vector<double>& x, double tol = kSnapTolerance) {
  Vector<double> s = x;
  for (auto& e : s) {
    if (std::abs(e) <= tol) e = 0.0;
    else if (std::abs(1.0 - e) <= tol) e = 1.0;
  }
  return s;
}

/// Zero or Interval shape; std::nullopt when the mechanism is not an interval mechanism.
inline std::optional<IntervalShape> classify(const Vector<double>& x, double tol = kSnapTolerance) {
  IntervalShape shape;
  shape.raw = x;
  shape.snapped = snap(x, tol);
  const auto& s = shape.snapped;
  int lo = -1, hi = -1;
  for (int k = 0; k < s.size(); ++k) {
    if (s[k] > 0.0) {
      if (lo < 0) lo = k;
      hi = k;
    }
  }
  if (lo < 0) return shape;
  for (int k = lo + 1; k < hi; ++k)
    if (s[k] != 1.0) return std::nullopt;
  shape.kind = IntervalShape::Kind::Interval;
  shape.lower = lo;
  shape.upper = hi;
  shape.lower_prob = s[lo];
  shape.upper_prob = s[hi];
  return shape;
}

template <typename Scalar>
std::optional<IntervalShape> classify(const Vector<Scalar>& x, double tol = kSnapTolerance) {
  return classify(to_double_vector(x), tol);
}

inline bool is_monotone(const Vector<double>& x, double tol = kSnapTolerance) {
  for (int k = 0; k + 1 < x.size(); ++k)
    if (x[k + 1] < x[k] - tol) return false;
  return true;
}

inline bool is_responsive(const Vector<double>& x, double tol = kSnapTolerance) {
  return x.size() > 0 && x.maxCoeff() - x.minCoeff() > tol;
}

/// A direct (not necessarily anonymous) mechanism: the probability of A for each
/// report profile. Bit i of the table index is set when agent i reports a.
struct DirectMechanism {
  int agents = 0;
  std::vector<double> table;
};

inline constexpr int kMaxDirectAgents = 20;

/// Anonymous voting mechanism obtained by averaging a direct mechanism over all
/// relabelings of the agents. Every permutation maps the profiles with tally k
/// onto themselves and each such profile is hit equally often, so the permutation
/// average at any profile equals the plain mean of the table over its tally class.
inline VotingMechanism<double> symmetrize(const DirectMechanism& direct) {
  if (direct.agents < 2 || direct.agents > kMaxDirectAgents)
    throw std::invalid_argument("direct mechanism agent count must lie in [2, 20]");
  const std::size_t profiles = std::size_t{1} << direct.agents;
  if (direct.table.size() != profiles)
    throw std::invalid_argument("direct mechanism table must have 2^(n+1) entries");
  Vector<double> sum = Vector<double>::Zero(direct.agents + 1);
  Vector<double> count = Vector<double>::Zero(direct.agents + 1);
  for (std::size_t s = 0; s < profiles; ++s) {
    const int k = std::popcount(static_cast<std::uint32_t>(s));
    sum[k] += direct.table[s];
    count[k] += 1.0;
  }
  return sum.cwiseQuotient(count);
}

/// Embeds a voting mechanism as a direct mechanism.
inline DirectMechanism as_direct(const VotingMechanism<double>& x) {
  DirectMechanism d;
  d.agents = static_cast<int>(x.size()) - 1;
  if (d.agents < 2 || d.agents > kMaxDirectAgents)
    throw std::invalid_argument("direct mechanism agent count must lie in [2, 20]");
  d.table.resize(std::size_t{1} << d.agents);
  for (std::size_t s = 0; s < d.table.size(); ++s)
    d.table[s] = x[std::popcount(static_cast<std::uint32_t>(s))];
  return d;
}

/// Principal's expected payoff of a direct mechanism in v-units, evaluated
/// profile by profile from the state-conditional signal distributions.
inline double direct_principal_payoff(const ModelParams& params, const DirectMechanism& direct) {
  if (direct.agents != params.agents() || direct.table.size() != (std::size_t{1} << direct.agents))
    throw std::invalid_argument("direct mechanism does not match the instance");
  const auto scale = params.payoff_scale();
  const int n1 = params.agents();
  double total = 0.0;
  for (std::size_t s = 0; s < direct.table.size(); ++s) {
    const int k = std::popcount(static_cast<std::uint32_t>(s));
    const double pr_a = std::pow(params.p_alpha(), k) * std::pow(1.0 - params.p_alpha(), n1 - k);
    const double pr_b = std::pow(params.p_beta(), k) * std::pow(1.0 - params.p_beta(), n1 - k);
    total += direct.table[s] * (params.prior_alpha() * pr_a * scale.V_alpha +
                                params.prior_beta() * pr_b * scale.V_beta);
  }
  return total / (params.prior_beta() * scale.V_alpha);
}

}  // namespace jurymech
