#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jurymech/mechanisms.hpp"
#include "jurymech/model.hpp"
#include "jurymech/simplex.hpp"

namespace jurymech {

enum class SolveStatus { Optimal, DegenerateTie };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::Optimal ? "optimal" : "degenerate-tie";
}

template <typename Scalar>
struct SolveResult {
  VotingMechanism<Scalar> x;
  Scalar objective;  // v-units
  bool binding_a = false;
  bool binding_b = false;
  std::vector<int> fractional_indices;
  SolveStatus status = SolveStatus::Optimal;
  /// Second optimal representative when status is DegenerateTie.
  std::optional<VotingMechanism<Scalar>> alternate;

  /// x, followed by the alternate representative when present.
  std::vector<VotingMechanism<Scalar>> optima() const {
    std::vector<VotingMechanism<Scalar>> out{x};
    if (alternate) out.push_back(*alternate);
    return out;
  }
};

template <typename Scalar>
bool same_mechanism(const VotingMechanism<Scalar>& lhs, const VotingMechanism<Scalar>& rhs) {
  if (lhs.size() != rhs.size()) return false;
  if constexpr (is_exact_v<Scalar>) {
    return lhs == rhs;
  } else {
    return (lhs - rhs).cwiseAbs().maxCoeff() <= kSnapTolerance;
  }
}

/// Fills objective, binding flags and fractional entries for a chosen optimum.
template <typename Scalar>
SolveResult<Scalar> describe_solution(const LPInstance<Scalar>& lp, VotingMechanism<Scalar> x,
                                      std::optional<VotingMechanism<Scalar>> alternate = std::nullopt) {
  SolveResult<Scalar> r;
  const auto ic = ic_report(lp, x);
  r.objective = lp.v.dot(x);
  r.binding_a = ic.verdict_a == Verdict::Binding;
  r.binding_b = ic.verdict_b == Verdict::Binding;
  const auto snapped = snap(to_double_vector(x));
  for (int k = 0; k < snapped.size(); ++k)
    if (snapped[k] > 0.0 && snapped[k] < 1.0) r.fractional_indices.push_back(k);
  r.x = std::move(x);
  if (alternate && !same_mechanism(r.x, *alternate)) {
    r.status = SolveStatus::DegenerateTie;
    r.alternate = std::move(alternate);
  }
  return r;
}

namespace detail {

template <typename Scalar>
SolveResult<Scalar> solve_with_rows(const LPInstance<Scalar>& lp, bool include_ic_a) {
  const int size = static_cast<int>(lp.size());
  BoundedLP<Scalar> problem;
  problem.objective = lp.v;
  problem.rows.resize(include_ic_a ? 2 : 1, size);
  int row = 0;
  problem.rows.row(row++) = -lp.db.transpose();  // db . x >= 0
  if (include_ic_a) problem.rows.row(row++) = lp.da.transpose();
  problem.rhs = Vector<Scalar>::Zero(problem.rows.rows());
  problem.upper = Vector<Scalar>::Constant(size, Scalar(1));

  BoundedSimplex<Scalar> simplex(problem);
  simplex.optimize();
  VotingMechanism<Scalar> first = simplex.solution();
  // Degenerate ties: prefer the optimum with the largest total mass.
  simplex.optimize_secondary(Vector<Scalar>::Constant(size, Scalar(1)));
  return describe_solution(lp, simplex.solution(), std::optional<VotingMechanism<Scalar>>(first));
}

}  // namespace detail

/// Optimal voting mechanism from the full program: box constraints, IC-a' and IC-b'.
template <typename Scalar>
SolveResult<Scalar> solve_full(const BasicModelParams<Scalar>& params) {
  return detail::solve_with_rows(build_lp(params), true);
}

/// Same program with IC-a' dropped.
template <typename Scalar>
SolveResult<Scalar> solve_relaxed(const BasicModelParams<Scalar>& params) {
  return detail::solve_with_rows(build_lp(params), false);
}

}  // namespace jurymech
