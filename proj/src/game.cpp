#include "jurymech/game.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jurymech/parallel.hpp"

namespace jurymech {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::uint64_t kChunk = 1u << 16;

void require_length(const ModelParams& params, const VotingMechanism<double>& x) {
  if (x.size() != params.tallies())
    throw std::invalid_argument("mechanism length does not match agents+1");
}

// Distribution of the number of a-reports among `count` agents, each reporting a
// with probability p (p may be 0 or 1 for degenerate strategies).
Vector<double> tally_distribution(int count, double p) {
  Vector<double> pmf = Vector<double>::Zero(count + 1);
  if (p <= 0.0) {
    pmf[0] = 1.0;
  } else if (p >= 1.0) {
    pmf[count] = 1.0;
  } else {
    for (int k = 0; k <= count; ++k) pmf[k] = binom_pmf(p, k, count);
  }
  return pmf;
}

double report_rate(double precision, const ReportingStrategy& s) {
  return precision * s.q_a + (1.0 - precision) * s.q_b;
}

// E[U(w) (x(T+1) - x(T)) | own signal], T the others' a-report tally: the gain
// from reporting a instead of b.
double gain_from_reporting_a(const ModelParams& params, const VotingMechanism<double>& x,
                             const ReportingStrategy& others, bool signal_a) {
  const auto scale = params.payoff_scale();
  const int n = params.others();
  const double pa = params.p_alpha();
  const double pb = params.p_beta();
  const double weight_alpha = params.prior_alpha() * (signal_a ? pa : 1.0 - pa);
  const double weight_beta = params.prior_beta() * (signal_a ? pb : 1.0 - pb);
  const double evidence = weight_alpha + weight_beta;
  const Vector<double> jump = x.tail(n + 1) - x.head(n + 1);
  const double pivot_alpha = tally_distribution(n, report_rate(pa, others)).dot(jump);
  const double pivot_beta = tally_distribution(n, report_rate(pb, others)).dot(jump);
  return (weight_alpha * scale.U_alpha * pivot_alpha + weight_beta * scale.U_beta * pivot_beta) / evidence;
}

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double draw(std::uint64_t seed, std::uint64_t trial, std::uint64_t index) {
  return static_cast<double>(mix(mix(seed ^ mix(trial)) + index) >> 11) * 0x1.0p-53;
}

struct Moments {
  double principal = 0.0, principal_sq = 0.0;
  double agent = 0.0, agent_sq = 0.0;
};

}  // namespace

DeviationGains deviation_gains(const ModelParams& params, const VotingMechanism<double>& x) {
  require_length(params, x);
  const auto truthful = ReportingStrategy::truthful();
  return {gain_from_reporting_a(params, x, truthful, true), -gain_from_reporting_a(params, x, truthful, false)};
}

ReportingStrategy unilateral_best_response(const ModelParams& params, const VotingMechanism<double>& x,
                                           const ReportingStrategy& others) {
  require_length(params, x);
  const double after_a = gain_from_reporting_a(params, x, others, true);
  const double after_b = gain_from_reporting_a(params, x, others, false);
  return {after_a >= -kTieTolerance ? 1.0 : 0.0, after_b > kTieTolerance ? 1.0 : 0.0};
}

ExpectedPayoffs expected_payoffs(const ModelParams& params, const VotingMechanism<double>& x,
                                 const ReportingStrategy& strategy) {
  require_length(params, x);
  const auto scale = params.payoff_scale();
  const int n1 = params.agents();
  const double chosen_alpha = tally_distribution(n1, report_rate(params.p_alpha(), strategy)).dot(x);
  const double chosen_beta = tally_distribution(n1, report_rate(params.p_beta(), strategy)).dot(x);
  const double pa = params.prior_alpha() * chosen_alpha;
  const double pb = params.prior_beta() * chosen_beta;
  return {pa * scale.V_alpha + pb * scale.V_beta, pa * scale.U_alpha + pb * scale.U_beta};
}

SimulationReport simulate(const ModelParams& params, const VotingMechanism<double>& x,
                          const ReportingStrategy& strategy, const SimConfig& config) {
  require_length(params, x);
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
  const auto scale = params.payoff_scale();
  const int n1 = params.agents();
  const std::uint64_t chunks = (config.trials + kChunk - 1) / kChunk;
  std::vector<Moments> partial(chunks);

  parallel_for(chunks, [&](std::size_t c) {
    Moments m;
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(config.trials, begin + kChunk);
    for (std::uint64_t t = begin; t < end; ++t) {
      std::uint64_t index = 0;
      const bool alpha = draw(config.seed, t, index++) < params.prior_alpha();
      const double precision = alpha ? params.p_alpha() : params.p_beta();
      int tally = 0;
      for (int j = 0; j < n1; ++j) {
        const bool signal_a = draw(config.seed, t, index++) < precision;
        const double q = signal_a ? strategy.q_a : strategy.q_b;
        if (draw(config.seed, t, index++) < q) ++tally;
      }
      const bool choose_a = draw(config.seed, t, index++) < x[tally];
      const double principal = choose_a ? (alpha ? scale.V_alpha : scale.V_beta) : 0.0;
      const double agent = choose_a ? (alpha ? scale.U_alpha : scale.U_beta) : 0.0;
      m.principal += principal;
      m.principal_sq += principal * principal;
      m.agent += agent;
      m.agent_sq += agent * agent;
    }
    partial[c] = m;
  });

  Moments total;
  for (const auto& m : partial) {
    total.principal += m.principal;
    total.principal_sq += m.principal_sq;
    total.agent += m.agent;
    total.agent_sq += m.agent_sq;
  }
  const double n = static_cast<double>(config.trials);
  auto standard_error = [n](double sum, double sum_sq) {
    if (n < 2.0) return 0.0;
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    return std::sqrt(var / n);
  };
  return {config.trials,
          config.seed,
          total.principal / n,
          standard_error(total.principal, total.principal_sq),
          total.agent / n,
          standard_error(total.agent, total.agent_sq)};
}

}  // namespace jurymech
