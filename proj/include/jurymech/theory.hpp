#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "jurymech/mechanisms.hpp"
#include "jurymech/model.hpp"

namespace jurymech {

struct NonmonotonicityThreshold {
  double t_bar_P;
  double c_prime;
};

/// Closed-form certificate: whenever t_P exceeds t_bar_P, the lowered
/// agent-preferred mechanism can be improved upon, so a responsive optimum is
/// non-monotone. Requires a conflict of interest (throws std::domain_error).
NonmonotonicityThreshold nonmonotonicity_threshold(const ModelParams& params);

/// Thrown by improving_deviation when delta leaves the unit box or breaks IC-a.
class DeltaTooLargeError : public std::invalid_argument {
 public:
  DeltaTooLargeError(const std::string& what, double max_delta)
      : std::invalid_argument(what), max_delta_(max_delta) {}
  /// Supremum of admissible deltas.
  double max_delta() const { return max_delta_; }

 private:
  double max_delta_;
};

/// Largest delta keeping the deviation inside the box with IC-a strict
/// (IC-a strictness makes the bound itself inadmissible when IC-a limits it).
double max_admissible_delta(const ModelParams& params);

/// y = x_hat + Delta, where Delta moves mass off tally k_J and off tally n+1 in the
/// proportions that keep IC-b binding.
VotingMechanism<double> improving_deviation(const ModelParams& params, double delta);

struct DeviationResult {
  VotingMechanism<double> y;
  double delta;
  /// Sum_k Delta(k) v(k), the exact change of the principal's objective.
  double gain;
  int halvings;
};

/// Deviation with delta = 1e-4 min(|db(k_J)|, |db(n+1)|), halved until admissible
/// (at most 60 times).
DeviationResult default_improving_deviation(const ModelParams& params);

enum class CheckStatus { Pass, Fail, Vacuous };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    default: return "vacuous";
  }
}

struct LemmaCheck {
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
  std::map<std::string, double> values;

  bool ok() const { return status != CheckStatus::Fail; }
};

struct TheoryReport {
  bool conflict = false;
  bool first_best_achievable = false;
  std::optional<double> t_bar_P;
  std::optional<double> c_prime;
  std::map<std::string, LemmaCheck> lemma_results;  // ordered by name

  bool all_passed() const {
    for (const auto& [name, check] : lemma_results)
      if (!check.ok()) return false;
    return true;
  }
};

namespace lemma {
inline constexpr const char* kAgentPreferredStrict = "01_agent_preferred_strict_ic";
inline constexpr const char* kPrincipalPreferredIcB = "02_principal_preferred_ic_b_iff_conflict";
inline constexpr const char* kFirstBest = "03_first_best_iff_no_conflict";
inline constexpr const char* kLoweredRaised = "04_lowered_raised_ic_patterns";
inline constexpr const char* kFractionalCount = "05_extreme_point_fractional_count";
inline constexpr const char* kMarginRatio = "06_margin_ratio_pattern";
inline constexpr const char* kVirtualUtility = "07_virtual_utility_interval";
inline constexpr const char* kMonotoneOptimum = "08_monotone_optimum_is_lowered";
inline constexpr const char* kNonmonotone = "09_nonmonotone_above_threshold";
inline constexpr const char* kIntervalStructure = "10_interval_optimum_structure";
inline constexpr const char* kIntervalICa = "11_interval_ic_a_lemma";
inline constexpr const char* kOracleAgreement = "12_solver_agreement";
}  // namespace lemma

/// The Lagrange multiplier grid {0, 0.01, ..., 10} used for the sign-pattern check.
std::vector<double> multiplier_grid();

/// True when {k : values[k] >= 0} is a (possibly empty) run of consecutive tallies.
bool nonnegative_set_is_interval(const Vector<double>& values);

/// Runs the full structural verification suite on one instance.
TheoryReport verify_lemmas(const ModelParams& params);

/// Smallest t_P on the (ascending) grid whose optimum is responsive and
/// non-monotone, keeping every other parameter fixed.
std::optional<double> empirical_nonmonotone_onset(const ModelParams& params,
                                                  const std::vector<double>& t_P_grid);

/// Seeded generator of valid random instances: n+1 in {2..15}, p_beta in
/// (0.05, 0.6), p_alpha in (p_beta+0.1, 0.95), prior in (0.2, 0.8), thresholds
/// log-uniform in (L(0), L(n+1)) and ordered, rejecting near-indifferences (1e-6).
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  ModelParams next();
  /// A conflicted instance with t_P log-uniform in (t_bar_P, L(n+1)).
  ModelParams next_conflicted_above_threshold();

 private:
  double uniform(double lo, double hi);
  std::mt19937_64 rng_;
};

}  // namespace jurymech
