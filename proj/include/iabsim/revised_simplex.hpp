#pragma once

// Dense revised simplex for   min c'x  s.t.  A x = b,  x >= 0.
//
// The basis inverse is kept explicitly and updated with product-form pivots,
// then rebuilt from scratch (LU) every `refactor_period` pivots. Pricing is
// Bland's rule (lowest-index improving column, lowest-key leaving variable);
// after a long run of degenerate pivots the ratio-test ties switch to the
// lexicographic rule. Feasibility comes from a phase-one problem over one
// artificial per row. Columns may be appended after a solve; the next
// solve warm-starts from the previous basis, which stays primal feasible.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace iabsim::lp {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Status { optimal, infeasible, unbounded, pivot_limit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::pivot_limit: return "pivot_limit";
  }
  return "?";
}

struct SimplexOptions {
  double optimality_tol = 1e-9;  // reduced cost
  double feasibility_tol = 1e-10;  // x >= 0
  double pivot_tol = 1e-9;
  int refactor_period = 50;
  /// Degenerate pivots in a row before ties go lexicographic; 0 = 5 * rows.
  int stall_limit = 0;
  long max_pivots = 200000;
};

class RevisedSimplex {
 public:
  RevisedSimplex(Eigen::VectorXd rhs, SimplexOptions options = {})
      : b_(std::move(rhs)), options_(options), row_sign_(b_.size(), 1.0) {
    for (Eigen::Index i = 0; i < b_.size(); ++i) {
      if (b_[i] < 0.0) {
        row_sign_[static_cast<std::size_t>(i)] = -1.0;
        b_[i] = -b_[i];
      }
    }
    if (options_.stall_limit <= 0) options_.stall_limit = 5 * static_cast<int>(rows());
  }

  std::size_t rows() const { return static_cast<std::size_t>(b_.size()); }
  std::size_t cols() const { return columns_.size(); }

  /// Appends a structural column; returns its index.
  std::size_t add_column(const Eigen::VectorXd& column, double cost) {
    if (static_cast<std::size_t>(column.size()) != rows()) throw std::invalid_argument("add_column: wrong length");
    Eigen::VectorXd c = column;
    for (std::size_t i = 0; i < rows(); ++i) c[static_cast<Eigen::Index>(i)] *= row_sign_[i];
    columns_.push_back(std::move(c));
    costs_.push_back(cost);
    in_basis_.push_back(false);
    return columns_.size() - 1;
  }

  const Eigen::VectorXd& column(std::size_t j) const { return columns_[j]; }

  Status solve() {
    if (!feasible_basis_) {
      start_phase_one();
      const Status s = iterate(true);
      if (s != Status::optimal) return status_ = s;
      double infeasibility = 0.0;
      for (std::size_t r = 0; r < rows(); ++r) {
        if (is_artificial(basis_[r])) infeasibility += x_b_[static_cast<Eigen::Index>(r)];
      }
      if (infeasibility > options_.feasibility_tol * (1.0 + b_.lpNorm<1>()) * 10.0) {
        return status_ = Status::infeasible;
      }
      drive_out_artificials();
      feasible_basis_ = true;
    }
    return status_ = iterate(false);
  }

  Status status() const { return status_; }

  /// Primal value of every structural column.
  std::vector<double> primal() const {
    std::vector<double> x(cols(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r) {
      if (!is_artificial(basis_[r])) x[static_cast<std::size_t>(basis_[r])] = x_b_[static_cast<Eigen::Index>(r)];
    }
    return x;
  }

  double objective() const {
    double z = 0.0;
    for (std::size_t r = 0; r < rows(); ++r) z += cost_of(basis_[r], false) * x_b_[static_cast<Eigen::Index>(r)];
    return z;
  }

  /// Simplex multipliers y = c_B' B^{-1} for the rows as given to the
  /// constructor.
  std::vector<double> duals() const {
    const Eigen::VectorXd y = basic_costs(false).transpose() * binv_;
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < rows(); ++i) out[i] = y[static_cast<Eigen::Index>(i)] * row_sign_[i];
    return out;
  }

  /// c_j - y' A_j for a column in the constructor's row orientation.
  double reduced_cost(const Eigen::VectorXd& column, double cost) const {
    const auto y = duals();
    double d = cost;
    for (std::size_t i = 0; i < rows(); ++i) d -= y[i] * column[static_cast<Eigen::Index>(i)];
    return d;
  }

  /// Basic variable per row; negative entries are artificials (-(row+1)).
  const std::vector<long>& basis() const { return basis_; }
  long pivots() const { return pivots_; }

 private:
  static bool is_artificial(long v) { return v < 0; }

  double cost_of(long v, bool phase_one) const {
    if (is_artificial(v)) return phase_one ? 1.0 : 0.0;
    return phase_one ? 0.0 : costs_[static_cast<std::size_t>(v)];
  }

  Eigen::VectorXd basic_costs(bool phase_one) const {
    Eigen::VectorXd c(static_cast<Eigen::Index>(rows()));
    for (std::size_t r = 0; r < rows(); ++r) c[static_cast<Eigen::Index>(r)] = cost_of(basis_[r], phase_one);
    return c;
  }

  // Fixed variable order for Bland's rule: structurals by index, then artificials.
  static long bland_key(long v) {
    return is_artificial(v) ? std::numeric_limits<long>::max() / 2 + (-v) : v;
  }

  Eigen::VectorXd column_of(long v) const {
    if (!is_artificial(v)) return columns_[static_cast<std::size_t>(v)];
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows()));
    e[-v - 1] = 1.0;
    return e;
  }

  void start_phase_one() {
    const auto m = static_cast<Eigen::Index>(rows());
    basis_.resize(rows());
    for (std::size_t r = 0; r < rows(); ++r) basis_[r] = -static_cast<long>(r) - 1;
    std::fill(in_basis_.begin(), in_basis_.end(), false);
    binv_ = Eigen::MatrixXd::Identity(m, m);
    x_b_ = b_;
    since_refactor_ = 0;
  }

  void refactor() {
    const auto m = static_cast<Eigen::Index>(rows());
    Eigen::MatrixXd basis_matrix(m, m);
    for (std::size_t r = 0; r < rows(); ++r) basis_matrix.col(static_cast<Eigen::Index>(r)) = column_of(basis_[r]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    binv_ = lu.inverse();
    x_b_ = binv_ * b_;
    clean_primal();
    since_refactor_ = 0;
  }

  void clean_primal() {
    for (Eigen::Index r = 0; r < x_b_.size(); ++r) {
      if (x_b_[r] < 0.0 && x_b_[r] > -options_.feasibility_tol * (1.0 + std::abs(b_.maxCoeff()))) x_b_[r] = 0.0;
    }
  }

  void pivot(std::size_t leave_row, long enter, const Eigen::VectorXd& direction) {
    const auto r = static_cast<Eigen::Index>(leave_row);
    const double pivot_value = direction[r];
    const double step = x_b_[r] / pivot_value;
    x_b_ -= step * direction;
    x_b_[r] = step;
    binv_.row(r) /= pivot_value;
    for (Eigen::Index i = 0; i < binv_.rows(); ++i) {
      if (i != r && direction[i] != 0.0) binv_.row(i) -= direction[i] * binv_.row(r);
    }
    if (!is_artificial(basis_[leave_row])) in_basis_[static_cast<std::size_t>(basis_[leave_row])] = false;
    basis_[leave_row] = enter;
    if (!is_artificial(enter)) in_basis_[static_cast<std::size_t>(enter)] = true;
    ++pivots_;
    if (++since_refactor_ >= options_.refactor_period) {
      refactor();
    } else {
      clean_primal();
    }
  }

  Status iterate(bool phase_one) {
    int degenerate_run = 0;
    long local_pivots = 0;
    while (true) {
      if (local_pivots++ > options_.max_pivots) return Status::pivot_limit;
      const Eigen::RowVectorXd y = basic_costs(phase_one).transpose() * binv_;

      // Bland: first structural column with a negative reduced cost.
      long enter = -1;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (in_basis_[j]) continue;
        const double d = cost_of(static_cast<long>(j), phase_one) - y.dot(columns_[j]);
        if (d < -options_.optimality_tol) {
          enter = static_cast<long>(j);
          break;
        }
      }
      if (enter < 0) return Status::optimal;

      const Eigen::VectorXd direction = binv_ * columns_[static_cast<std::size_t>(enter)];
      const bool lexicographic = degenerate_run > options_.stall_limit;
      long leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows(); ++r) {
        const double u = direction[static_cast<Eigen::Index>(r)];
        if (u <= options_.pivot_tol) continue;
        const double ratio = x_b_[static_cast<Eigen::Index>(r)] / u;
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          leave = static_cast<long>(r);
        } else if (ratio <= best_ratio + 1e-12 && prefer(r, static_cast<std::size_t>(leave), direction, lexicographic)) {
          best_ratio = std::min(best_ratio, ratio);
          leave = static_cast<long>(r);
        }
      }
      if (leave < 0) return Status::unbounded;
      degenerate_run = best_ratio <= options_.feasibility_tol ? degenerate_run + 1 : 0;
      pivot(static_cast<std::size_t>(leave), enter, direction);
    }
  }

  // Tie-break between two candidate leaving rows with equal ratio.
  bool prefer(std::size_t candidate, std::size_t incumbent, const Eigen::VectorXd& direction,
              bool lexicographic) const {
    if (lexicographic) {
      const auto a = static_cast<Eigen::Index>(candidate), b = static_cast<Eigen::Index>(incumbent);
      for (Eigen::Index k = 0; k < binv_.cols(); ++k) {
        const double va = binv_(a, k) / direction[a];
        const double vb = binv_(b, k) / direction[b];
        if (std::abs(va - vb) > 1e-12) return va < vb;
      }
    }
    return bland_key(basis_[candidate]) < bland_key(basis_[incumbent]);
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows(); ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (in_basis_[j]) continue;
        const Eigen::VectorXd direction = binv_ * columns_[j];
        if (std::abs(direction[static_cast<Eigen::Index>(r)]) > options_.pivot_tol) {
          x_b_[static_cast<Eigen::Index>(r)] = 0.0;
          pivot(r, static_cast<long>(j), direction);
          break;
        }
      }
      // An artificial that cannot leave sits on a redundant row at zero.
    }
  }

  Eigen::VectorXd b_;
  SimplexOptions options_;
  std::vector<double> row_sign_;
  std::vector<Eigen::VectorXd> columns_;
  std::vector<double> costs_;
  std::vector<bool> in_basis_;
  std::vector<long> basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_b_;
  bool feasible_basis_ = false;
  int since_refactor_ = 0;
  long pivots_ = 0;
  Status status_ = Status::infeasible;
};

}  // namespace iabsim::lp
