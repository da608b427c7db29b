#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jurymech/scalar.hpp"

namespace jurymech {

/// Raw payoffs of alternative A in each state; B is normalized to zero.
template <typename Scalar>
struct Payoffs {
  Scalar V_alpha, V_beta;  // principal
  Scalar U_alpha, U_beta;  // agents
};

struct AssumptionReport {
  bool a1_ordering = true;
  bool a2_no_partisans = true;
  bool a3_no_indifference = true;
  std::vector<std::string> messages;

  bool ok() const { return a1_ordering && a2_no_partisans && a3_no_indifference; }
};

/// Thrown when a parameter set violates one of the ordering / no-partisan /
/// no-indifference assumptions. Carries the full report.
class AssumptionError : public std::invalid_argument {
 public:
  explicit AssumptionError(AssumptionReport report)
      : std::invalid_argument(describe(report)), report_(std::move(report)) {}
  const AssumptionReport& report() const { return report_; }

 private:
  static std::string describe(const AssumptionReport& r) {
    std::string out = "assumption violated:";
    for (const auto& m : r.messages) out += " " + m + ";";
    return out;
  }
  AssumptionReport report_;
};

/// Threshold outside (L(0), L(n+1)).
class PartisanThresholdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kIndifferenceTolerance = 1e-9;

template <typename Scalar>
class BasicModelParams;

template <typename Scalar>
AssumptionReport validate_assumptions(const BasicModelParams<Scalar>& params);

/// A problem instance: n+1 agents with conditionally independent binary signals,
/// a prior on state alpha, signal precisions and the two thresholds of doubt.
/// Thresholds are the canonical form; the payoff quadruple is kept only to report
/// payoffs in their original units.
template <typename Scalar>
class BasicModelParams {
 public:
  /// Validated construction from thresholds. Throws AssumptionError.
  static BasicModelParams from_thresholds(int n_plus_1, Scalar prior_alpha, Scalar p_alpha,
                                          Scalar p_beta, Scalar t_P, Scalar t_J) {
    auto p = unvalidated(n_plus_1, std::move(prior_alpha), std::move(p_alpha), std::move(p_beta),
                         std::move(t_P), std::move(t_J));
    p.require_assumptions();
    return p;
  }

  /// Validated construction from payoffs, t_P = -V_beta/V_alpha and t_J = -U_beta/U_alpha.
  static BasicModelParams from_payoffs(int n_plus_1, Scalar prior_alpha, Scalar p_alpha,
                                       Scalar p_beta, Scalar V_alpha, Scalar V_beta,
                                       Scalar U_alpha, Scalar U_beta) {
    if (!(V_alpha > Scalar(0) && V_beta < Scalar(0)))
      throw std::invalid_argument("payoff sign violation: require V_alpha > 0 > V_beta");
    if (!(U_alpha > Scalar(0) && U_beta < Scalar(0)))
      throw std::invalid_argument("payoff sign violation: require U_alpha > 0 > U_beta");
    Scalar t_P = -V_beta / V_alpha;
    Scalar t_J = -U_beta / U_alpha;
    auto p = unvalidated(n_plus_1, std::move(prior_alpha), std::move(p_alpha), std::move(p_beta),
                         std::move(t_P), std::move(t_J));
    p.payoffs_ = Payoffs<Scalar>{V_alpha, V_beta, U_alpha, U_beta};
    p.require_assumptions();
    return p;
  }

  /// Domain checks only (counts, probabilities, positivity, informativeness).
  /// Use validate_assumptions() on the result to inspect assumption status.
  static BasicModelParams unvalidated(int n_plus_1, Scalar prior_alpha, Scalar p_alpha,
                                      Scalar p_beta, Scalar t_P, Scalar t_J) {
    if (n_plus_1 < 2) throw std::invalid_argument("agent count must be at least 2");
    auto in_unit = [](const Scalar& v) { return v > Scalar(0) && v < Scalar(1); };
    if (!in_unit(prior_alpha)) throw std::invalid_argument("prior_alpha must lie in (0,1)");
    if (!in_unit(p_alpha) || !in_unit(p_beta))
      throw std::invalid_argument("signal precisions must lie in (0,1)");
    if (!(p_alpha > p_beta)) throw std::invalid_argument("signals uninformative: need p_alpha > p_beta");
    if (!(t_P > Scalar(0)) || !(t_J > Scalar(0)))
      throw std::invalid_argument("thresholds of doubt must be positive");
    BasicModelParams p;
    p.n_plus_1_ = n_plus_1;
    p.prior_alpha_ = std::move(prior_alpha);
    p.p_alpha_ = std::move(p_alpha);
    p.p_beta_ = std::move(p_beta);
    p.t_P_ = std::move(t_P);
    p.t_J_ = std::move(t_J);
    return p;
  }

  int agents() const { return n_plus_1_; }
  /// n, the number of other agents seen by any one agent.
  int others() const { return n_plus_1_ - 1; }
  /// Length of a voting mechanism, n+2.
  int tallies() const { return n_plus_1_ + 1; }

  const Scalar& prior_alpha() const { return prior_alpha_; }
  Scalar prior_beta() const { return Scalar(1) - prior_alpha_; }
  const Scalar& p_alpha() const { return p_alpha_; }
  const Scalar& p_beta() const { return p_beta_; }
  const Scalar& t_P() const { return t_P_; }
  const Scalar& t_J() const { return t_J_; }

  bool has_payoffs() const { return payoffs_.has_value(); }
  const std::optional<Payoffs<Scalar>>& payoffs() const { return payoffs_; }

  /// Supplied payoffs, or the normalization V(alpha)=U(alpha)=1, V(beta)=-t_P, U(beta)=-t_J.
  Payoffs<Scalar> payoff_scale() const {
    if (payoffs_) return *payoffs_;
    return Payoffs<Scalar>{Scalar(1), Scalar(-t_P_), Scalar(1), Scalar(-t_J_)};
  }

 private:
  BasicModelParams() = default;

  void require_assumptions() const {
    auto report = validate_assumptions(*this);
    if (!report.ok()) throw AssumptionError(std::move(report));
  }

  int n_plus_1_ = 2;
  Scalar prior_alpha_, p_alpha_, p_beta_, t_P_, t_J_;
  std::optional<Payoffs<Scalar>> payoffs_;
};

using ModelParams = BasicModelParams<double>;
using RationalModelParams = BasicModelParams<Rational>;

/// log L(k), evaluated in double precision for any scalar type.
template <typename Scalar>
double log_likelihood(const BasicModelParams<Scalar>& params, double k) {
  const double prior = to_double(params.prior_alpha());
  const double pa = to_double(params.p_alpha());
  const double pb = to_double(params.p_beta());
  const double n1 = params.agents();
  return std::log(prior) - std::log1p(-prior) + k * (std::log(pa) - std::log(pb)) +
         (n1 - k) * (std::log1p(-pa) - std::log1p(-pb));
}

/// Growth rate of log L per additional a-signal.
template <typename Scalar>
double log_likelihood_step(const BasicModelParams<Scalar>& params) {
  const double pa = to_double(params.p_alpha());
  const double pb = to_double(params.p_beta());
  return std::log(pa) - std::log(pb) + std::log1p(-pb) - std::log1p(-pa);
}

/// Relative likelihood of state alpha when k of the n+1 agents hold an a-signal.
/// Defined for every integer k.
template <typename Scalar>
Scalar likelihood(const BasicModelParams<Scalar>& params, int k) {
  if constexpr (is_exact_v<Scalar>) {
    const Scalar odds = params.prior_alpha() / params.prior_beta();
    const Scalar up = params.p_alpha() / params.p_beta();
    const Scalar down = (Scalar(1) - params.p_alpha()) / (Scalar(1) - params.p_beta());
    const int rest = params.agents() - k;
    Scalar result = odds;
    result *= k >= 0 ? ipow(up, k) : ipow(Scalar(1) / up, -k);
    result *= rest >= 0 ? ipow(down, rest) : ipow(Scalar(1) / down, -rest);
    return result;
  } else {
    return std::exp(log_likelihood(params, static_cast<double>(k)));
  }
}

/// min{k : L(k) > threshold}. Throws PartisanThresholdError unless
/// L(0) < threshold < L(n+1).
template <typename Scalar>
int cutoff(const BasicModelParams<Scalar>& params, const Scalar& threshold) {
  const int top = params.agents();
  if (!(likelihood(params, 0) < threshold) || !(threshold < likelihood(params, top))) {
    std::ostringstream msg;
    msg << "threshold " << to_double(threshold) << " outside (L(0), L(n+1)) = ("
        << to_double(likelihood(params, 0)) << ", " << to_double(likelihood(params, top)) << ")";
    throw PartisanThresholdError(msg.str());
  }
  for (int k = 0; k <= top; ++k)
    if (likelihood(params, k) > threshold) return k;
  return top;  // unreachable given the range check
}

template <typename Scalar>
int agent_cutoff(const BasicModelParams<Scalar>& params) {
  return cutoff(params, params.t_J());
}

template <typename Scalar>
int principal_cutoff(const BasicModelParams<Scalar>& params) {
  return cutoff(params, params.t_P());
}

namespace detail {

// True when t sits within the indifference tolerance of some L(k), or when the
// real preimage L^{-1}(t) is within the tolerance of an integer.
template <typename Scalar>
bool near_indifference(const BasicModelParams<Scalar>& params, const Scalar& t) {
  for (int k = 0; k <= params.agents(); ++k) {
    const Scalar lk = likelihood(params, k);
    if constexpr (is_exact_v<Scalar>) {
      if (lk == t) return true;
    }
    const double l = to_double(lk);
    const double td = to_double(t);
    if (std::abs(l - td) <= kIndifferenceTolerance * std::max(std::abs(l), std::abs(td))) return true;
  }
  const double preimage =
      (std::log(to_double(t)) - log_likelihood(params, 0.0)) / log_likelihood_step(params);
  return std::abs(preimage - std::round(preimage)) <= kIndifferenceTolerance;
}

}  // namespace detail

/// Status of the ordering, no-partisan and no-indifference assumptions.
template <typename Scalar>
AssumptionReport validate_assumptions(const BasicModelParams<Scalar>& params) {
  AssumptionReport report;
  if (params.t_P() < params.t_J()) {
    report.a1_ordering = false;
    report.messages.push_back("A1 ordering: t_P must be >= t_J");
  }
  const Scalar low = likelihood(params, 0);
  const Scalar high = likelihood(params, params.agents());
  if (!(low < params.t_J()) || !(low < params.t_P()) || !(params.t_J() < high) ||
      !(params.t_P() < high)) {
    report.a2_no_partisans = false;
    report.messages.push_back("A2 no partisans: need L(0) < t_J, t_P < L(n+1)");
  }
  if (detail::near_indifference(params, params.t_J())) {
    report.a3_no_indifference = false;
    report.messages.push_back("A3 no indifference: t_J coincides with L(k) for an integer k");
  }
  if (detail::near_indifference(params, params.t_P())) {
    report.a3_no_indifference = false;
    report.messages.push_back("A3 no indifference: t_P coincides with L(k) for an integer k");
  }
  return report;
}

/// Agents and principal disagree on some signal profile: k_J < k_P.
template <typename Scalar>
bool conflict_of_interest(const BasicModelParams<Scalar>& params) {
  return agent_cutoff(params) < principal_cutoff(params);
}

/// Validated copy with new thresholds. Any payoff quadruple is dropped since it
/// would no longer match the thresholds.
template <typename Scalar>
BasicModelParams<Scalar> with_thresholds(const BasicModelParams<Scalar>& params, Scalar t_P,
                                         Scalar t_J) {
  return BasicModelParams<Scalar>::from_thresholds(params.agents(), params.prior_alpha(),
                                                   params.p_alpha(), params.p_beta(),
                                                   std::move(t_P), std::move(t_J));
}

/// Exact counterpart of a double instance; each field is rationalized.
RationalModelParams to_rational(const ModelParams& params);

ModelParams to_double_params(const RationalModelParams& params);

}  // namespace jurymech
