#pragma once

#include <cstdint>

#include "jurymech/mechanisms.hpp"
#include "jurymech/model.hpp"

namespace jurymech {

/// Symmetric reporting strategy: probability of reporting a after each signal.
struct ReportingStrategy {
  double q_a = 1.0;
  double q_b = 0.0;

  static ReportingStrategy truthful() { return {1.0, 0.0}; }
  bool operator==(const ReportingStrategy&) const = default;
};

struct SimConfig {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

/// Utility gains from truthful reporting, in agent payoff units
/// (normalized U(alpha) = 1, U(beta) = -t_J when no raw payoffs were given).
struct DeviationGains {
  double gain_a;  // after an a-signal: report a rather than b
  double gain_b;  // after a b-signal: report b rather than a
};

/// Exact gains when the other n agents report truthfully, from the
/// state-conditional binomial tally of their reports.
DeviationGains deviation_gains(const ModelParams& params, const VotingMechanism<double>& x);

/// Pure best response of one agent when the others play `others`. Ties within
/// 1e-12 utility units resolve toward truthful reporting.
ReportingStrategy unilateral_best_response(const ModelParams& params, const VotingMechanism<double>& x,
                                           const ReportingStrategy& others);

struct ExpectedPayoffs {
  double principal;
  double agent;
};

/// Exact expectations in payoff units when every agent plays `strategy`.
ExpectedPayoffs expected_payoffs(const ModelParams& params, const VotingMechanism<double>& x,
                                 const ReportingStrategy& strategy);

struct SimulationReport {
  std::uint64_t trials;
  std::uint64_t seed;
  double principal_mean;
  double principal_se;
  double agent_mean;
  double agent_se;
};

/// Monte Carlo play of the voting game. Draws come from a counter-based stream
/// keyed by (seed, trial, draw), and trials are summed in fixed-size chunks
/// merged in order, so the report is bit-identical for any worker count.
SimulationReport simulate(const ModelParams& params, const VotingMechanism<double>& x,
                          const ReportingStrategy& strategy, const SimConfig& config);

}  // namespace jurymech
