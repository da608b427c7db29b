#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>

#include "jurymech/scalar.hpp"

namespace jurymech {

/// max objective . x  s.t.  rows x <= rhs,  0 <= x <= upper,  with rhs >= 0 so
/// that the origin is a feasible starting vertex.
template <typename Scalar>
struct BoundedLP {
  Vector<Scalar> objective;
  Matrix<Scalar> rows;
  Vector<Scalar> rhs;
  Vector<Scalar> upper;
};

/// Dense primal simplex with explicit variable upper bounds (nonbasic variables
/// rest at either bound) and Bland's smallest-index rule for entering and leaving
/// choices. Intended for small, degenerate problems; works over double or Rational.
/// In floating point a reduced cost counts as nonzero only relative to the
/// magnitudes of the terms it sums.
template <typename Scalar>
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const BoundedLP<Scalar>& lp)
      : nx_(static_cast<int>(lp.objective.size())), m_(static_cast<int>(lp.rows.rows())) {
    if (lp.rows.cols() != nx_ || lp.rhs.size() != m_ || lp.upper.size() != nx_)
      throw std::invalid_argument("inconsistent LP dimensions");
    for (int i = 0; i < m_; ++i)
      if (lp.rhs[i] < Scalar(0)) throw std::invalid_argument("rhs must be non-negative");
    const int total = nx_ + m_;
    original_ = Matrix<Scalar>::Zero(m_, total);
    original_.leftCols(nx_) = lp.rows;
    for (int i = 0; i < m_; ++i) original_(i, nx_ + i) = Scalar(1);
    rhs_ = lp.rhs;
    tableau_ = original_;
    cost_ = Vector<Scalar>::Zero(total);
    cost_.head(nx_) = lp.objective;
    upper_ = Vector<Scalar>::Zero(total);
    upper_.head(nx_) = lp.upper;
    has_upper_.assign(total, false);
    for (int j = 0; j < nx_; ++j) has_upper_[j] = true;
    value_ = Vector<Scalar>::Zero(total);
    value_.tail(m_) = rhs_;
    status_.assign(total, State::Lower);
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = nx_ + i;
      status_[nx_ + i] = State::Basic;
    }
  }

  void optimize() {
    run(cost_, [](int) { return true; });
  }

  /// Moves along the optimal face of the primary objective, maximizing
  /// `secondary` (one weight per structural variable). Only columns with a
  /// zero primary reduced cost may enter.
  void optimize_secondary(const Vector<Scalar>& secondary) {
    Vector<Scalar> cost2 = Vector<Scalar>::Zero(nx_ + m_);
    cost2.head(nx_) = secondary;
    const Scalar tol = Tolerance<Scalar>::optimality();
    run(cost2, [&](int j) {
      const auto [d, magnitude] = reduced_cost(cost_, j);
      return abs_value(d) <= tol * magnitude;
    });
  }

  Vector<Scalar> solution() const { return value_.head(nx_); }
  Vector<Scalar> slacks() const { return value_.tail(m_); }
  Scalar objective() const { return cost_.head(nx_).dot(value_.head(nx_)); }
  int iterations() const { return iterations_; }

 private:
  enum class State { Basic, Lower, Upper };
  static constexpr int kMaxIterations = 100000;

  struct Pricing {
    Scalar d;
    Scalar magnitude;  // |c_j| + sum_i |c_B(i) T(i, j)|
  };

  Pricing reduced_cost(const Vector<Scalar>& cost, int j) const {
    Pricing p{cost[j], abs_value(cost[j])};
    for (int i = 0; i < m_; ++i) {
      const Scalar term = cost[basis_[i]] * tableau_(i, j);
      p.d -= term;
      if constexpr (!is_exact_v<Scalar>) p.magnitude += abs_value(term);
    }
    return p;
  }

  template <typename Filter>
  void run(const Vector<Scalar>& cost, Filter&& eligible) {
    const Scalar opt_tol = Tolerance<Scalar>::optimality();
    const Scalar piv_tol = Tolerance<Scalar>::pivot();
    const int total = nx_ + m_;
    for (;;) {
      int entering = -1;
      for (int j = 0; j < total && entering < 0; ++j) {
        if (status_[j] == State::Basic || !eligible(j)) continue;
        const auto [d, magnitude] = reduced_cost(cost, j);
        const Scalar bound = opt_tol * magnitude;
        if ((status_[j] == State::Lower && d > bound) || (status_[j] == State::Upper && d < -bound))
          entering = j;
      }
      if (entering < 0) break;
      if (++iterations_ > kMaxIterations) throw std::runtime_error("simplex iteration limit reached");

      const Scalar dir = status_[entering] == State::Lower ? Scalar(1) : Scalar(-1);
      // Ratio test. leave_row == -1 means the entering variable flips bounds.
      std::optional<Scalar> step;
      int leave_row = -1;
      bool leave_to_upper = false;
      if (has_upper_[entering]) step = upper_[entering];
      for (int i = 0; i < m_; ++i) {
        const Scalar rate = -dir * tableau_(i, entering);
        const int var = basis_[i];
        Scalar limit;
        bool to_upper;
        if (rate < -piv_tol) {
          limit = value_[var] / Scalar(-rate);
          to_upper = false;
        } else if (rate > piv_tol && has_upper_[var]) {
          limit = (upper_[var] - value_[var]) / rate;
          to_upper = true;
        } else {
          continue;
        }
        if (limit < Scalar(0)) limit = Scalar(0);
        bool take = !step.has_value() || limit < *step - piv_tol;
        if (!take && abs_value(Scalar(limit - *step)) <= piv_tol && leave_row >= 0 && var < basis_[leave_row])
          take = true;
        if (take) {
          step = limit;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (!step) throw std::logic_error("unbounded direction in a bounded LP");

      const Scalar t = *step;
      value_[entering] += dir * t;
      for (int i = 0; i < m_; ++i) value_[basis_[i]] -= dir * tableau_(i, entering) * t;

      if (leave_row < 0) {
        status_[entering] = status_[entering] == State::Lower ? State::Upper : State::Lower;
        value_[entering] = status_[entering] == State::Upper ? upper_[entering] : Scalar(0);
        continue;
      }
      const int leaving = basis_[leave_row];
      status_[leaving] = leave_to_upper ? State::Upper : State::Lower;
      value_[leaving] = leave_to_upper ? upper_[leaving] : Scalar(0);
      pivot(leave_row, entering);
    }
    if constexpr (!is_exact_v<Scalar>) refresh_basic_values();
  }

  void pivot(int row, int col) {
    const Scalar p = tableau_(row, col);
    tableau_.row(row) /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const Scalar f = tableau_(i, col);
      if (f != Scalar(0)) tableau_.row(i) -= f * tableau_.row(row);
    }
    status_[col] = State::Basic;
    basis_[row] = col;
  }

  // Recompute basic values from the original columns to shed accumulated
  // rounding from incremental updates.
  void refresh_basic_values() {
    const int total = nx_ + m_;
    Matrix<Scalar> basis_cols(m_, m_);
    for (int i = 0; i < m_; ++i) basis_cols.col(i) = original_.col(basis_[i]);
    Vector<Scalar> r = rhs_;
    for (int j = 0; j < total; ++j)
      if (status_[j] != State::Basic) r -= original_.col(j) * value_[j];
    const Vector<Scalar> xb = basis_cols.fullPivLu().solve(r);
    for (int i = 0; i < m_; ++i) value_[basis_[i]] = xb[i];
  }

  int nx_;
  int m_;
  Matrix<Scalar> original_;
  Matrix<Scalar> tableau_;
  Vector<Scalar> rhs_;
  Vector<Scalar> cost_;
  Vector<Scalar> upper_;
  std::vector<bool> has_upper_;
  Vector<Scalar> value_;
  std::vector<State> status_;
  std::vector<int> basis_;
  int iterations_ = 0;
};

}  // namespace jurymech
