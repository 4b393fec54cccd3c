#pragma once

// Max-min access throughput by column generation.
//
// Restricted master (one column per candidate activation t_i):
//
//   min  -theta
//   s.t. C t - w theta - s = 0     (one row per SBS / user)
//        1't               = 1     (frame row)
//        t, theta, s >= 0
//
// With multipliers p from the optimal basis, a schedule column c has reduced
// cost -sum_k p_k c[k] - p_frame. Since c[k] sums +c_{m,k} into the receiver
// and -c_{k,n} out of the transmitter, sum_k p_k c[k] equals the total of
// c_{m,k} (p_k - p_m) over the active links (p_MBS = 0). The most negative
// reduced cost is therefore a maximum-weight matching under those link
// weights, which the forest DP solves exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iabsim/matching.hpp"
#include "iabsim/revised_simplex.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

/// Link activation with the per-row net rate it delivers (one entry per
/// SBS/user row).
struct CapacityColumn {
  std::vector<LinkId> activation;
  std::vector<double> net_rate;
};

/// Maps a set of active links to per-link capacities for that slot; used by
/// the per-activation capacity model. Inactive links are ignored.
using SlotCapacityFn = std::function<std::vector<double>(std::span<const LinkId>)>;

inline CapacityColumn column_from_activation(std::span<const LinkId> activation, const Topology& topology,
                                             std::span<const double> capacities) {
  if (!is_valid_activation(activation, topology.links)) {
    throw std::invalid_argument("column_from_activation: activation is not a matching");
  }
  CapacityColumn col;
  col.activation.assign(activation.begin(), activation.end());
  std::sort(col.activation.begin(), col.activation.end());
  col.net_rate.assign(topology.num_rows(), 0.0);
  for (LinkId l : col.activation) {
    const Link& link = topology.links[l];
    col.net_rate[topology.row_of(link.to)] += capacities[l];
    if (!topology.is_mbs(link.from)) col.net_rate[topology.row_of(link.from)] -= capacities[l];
  }
  return col;
}

inline std::vector<CapacityColumn> initial_columns(const Topology& topology, std::span<const double> capacities) {
  std::vector<CapacityColumn> cols;
  cols.reserve(topology.links.size());
  for (LinkId l = 0; l < topology.links.size(); ++l) {
    const LinkId single[] = {l};
    cols.push_back(column_from_activation(single, topology, capacities));
  }
  return cols;
}

/// Weight 1 on users, 0 on SBSs, indexed by row.
inline std::vector<double> user_weights(const Topology& topology) {
  std::vector<double> w(topology.num_rows(), 0.0);
  for (const Node& n : topology.nodes) {
    if (n.kind == NodeKind::user) w[topology.row_of(n.id)] = 1.0;
  }
  return w;
}

inline void validate_weights(std::span<const double> w) {
  bool positive = false;
  for (double x : w) {
    if (!(x >= 0.0)) throw std::invalid_argument("weight vector entries must be >= 0");
    positive = positive || x > 0.0;
  }
  if (!positive) throw std::invalid_argument("weight vector needs at least one positive entry");
}

struct LpSolution {
  double theta = 0.0;                 // bit/s
  std::vector<double> slot_durations;  // one per column
  /// Basic variables in x = [t, theta, s] order: t_i -> i, theta -> n,
  /// s_k -> n + 1 + k; -1 marks an artificial left on a redundant row.
  std::vector<long> basis;
  /// Node-row multipliers followed by the frame-row multiplier.
  std::vector<double> duals;
  double primal_objective = 0.0;  // -theta
  double dual_objective = 0.0;    // p . g = p_frame
  lp::Status status = lp::Status::infeasible;
};

/// Restricted master problem over a growing set of schedule columns. The
/// node rows are divided by `capacity_scale` internally so the simplex works
/// on O(1) numbers; every reported quantity is in bit/s.
class RestrictedMaster {
 public:
  RestrictedMaster(std::span<const double> w, double capacity_scale, double tolerance = 1e-9)
      : rows_(w.size()), scale_(capacity_scale > 0.0 ? capacity_scale : 1.0), simplex_(rhs(w.size()), options(tolerance)) {
    validate_weights(w);
    Eigen::VectorXd theta_col = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_ + 1));
    for (std::size_t k = 0; k < rows_; ++k) theta_col[static_cast<Eigen::Index>(k)] = -w[k];
    simplex_.add_column(theta_col, -1.0);
    for (std::size_t k = 0; k < rows_; ++k) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_ + 1));
      s[static_cast<Eigen::Index>(k)] = -1.0;
      simplex_.add_column(s, 0.0);
    }
  }

  void add(const CapacityColumn& column) {
    if (column.net_rate.size() != rows_) throw std::invalid_argument("RestrictedMaster: column length mismatch");
    Eigen::VectorXd c(static_cast<Eigen::Index>(rows_ + 1));
    for (std::size_t k = 0; k < rows_; ++k) c[static_cast<Eigen::Index>(k)] = column.net_rate[k] / scale_;
    c[static_cast<Eigen::Index>(rows_)] = 1.0;
    simplex_.add_column(c, 0.0);
    columns_.push_back(column);
  }

  const std::vector<CapacityColumn>& columns() const { return columns_; }
  double scale() const { return scale_; }

  LpSolution solve() {
    LpSolution sol;
    sol.status = simplex_.solve();
    if (sol.status == lp::Status::infeasible) throw lp::SolverError("restricted master is infeasible");
    if (sol.status == lp::Status::unbounded) throw lp::SolverError("restricted master is unbounded");
    if (sol.status == lp::Status::pivot_limit) throw lp::SolverError("restricted master hit the pivot limit");
    const auto x = simplex_.primal();
    sol.theta = x[0] * scale_;
    const std::size_t first = 1 + rows_;
    sol.slot_durations.assign(x.begin() + static_cast<std::ptrdiff_t>(first), x.end());
    for (long v : simplex_.basis()) {
      if (v < 0) {
        sol.basis.push_back(-1);
      } else if (v == 0) {
        sol.basis.push_back(static_cast<long>(columns_.size()));
      } else if (static_cast<std::size_t>(v) < first) {
        sol.basis.push_back(static_cast<long>(columns_.size()) + v);
      } else {
        sol.basis.push_back(v - static_cast<long>(first));
      }
    }
    sol.duals = simplex_.duals();
    sol.duals[rows_] *= scale_;
    sol.primal_objective = simplex_.objective() * scale_;
    sol.dual_objective = sol.duals[rows_];
    return sol;
  }

 private:
  static Eigen::VectorXd rhs(std::size_t rows) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows + 1));
    g[static_cast<Eigen::Index>(rows)] = 1.0;
    return g;
  }
  static lp::SimplexOptions options(double tolerance) {
    lp::SimplexOptions o;
    o.optimality_tol = tolerance;
    return o;
  }

  std::size_t rows_;
  double scale_;
  lp::RevisedSimplex simplex_;
  std::vector<CapacityColumn> columns_;
};

inline double max_abs_rate(std::span<const CapacityColumn> columns) {
  double m = 0.0;
  for (const auto& c : columns) {
    for (double v : c.net_rate) m = std::max(m, std::abs(v));
  }
  return m;
}

/// One-shot solve of the restricted master over `columns`.
inline LpSolution solve_restricted_lp(std::span<const CapacityColumn> columns, std::span<const double> w,
                                      double tolerance = 1e-9) {
  if (columns.empty()) throw std::invalid_argument("solve_restricted_lp: need at least one column");
  RestrictedMaster master(w, max_abs_rate(columns), tolerance);
  for (const auto& c : columns) master.add(c);
  return master.solve();
}

/// Pricing weight per link: c_{m,k} (p_k - p_m), with p_m = 0 for an MBS.
inline std::vector<double> price_links(std::span<const double> duals, std::span<const double> capacities,
                                       const Topology& topology) {
  std::vector<double> weights(topology.links.size(), 0.0);
  for (LinkId l = 0; l < topology.links.size(); ++l) {
    const Link& link = topology.links[l];
    const double p_rx = duals[topology.row_of(link.to)];
    const double p_tx = topology.is_mbs(link.from) ? 0.0 : duals[topology.row_of(link.from)];
    weights[l] = capacities[l] * (p_rx - p_tx);
  }
  return weights;
}

struct OptimalityGap {
  double eta1 = 0.0;  // best new schedule column
  double eta2 = 0.0;  // theta column
  double eta3 = 0.0;  // surplus columns
  double eta = 0.0;
};

/// Reduced costs of the three column families. `duals` holds the node rows
/// followed by the frame row; `best_matching_value` is W*.
inline OptimalityGap optimality_gap(std::span<const double> duals, double best_matching_value,
                                    std::span<const double> w) {
  const std::size_t rows = w.size();
  OptimalityGap g;
  g.eta1 = -best_matching_value - duals[rows];
  g.eta2 = -1.0;
  g.eta3 = rows == 0 ? 0.0 : duals[0];
  for (std::size_t i = 0; i < rows; ++i) {
    g.eta2 += duals[i] * w[i];
    g.eta3 = std::min(g.eta3, duals[i]);
  }
  g.eta = std::min({g.eta1, g.eta2, g.eta3});
  return g;
}

struct Slot {
  double duration = 0.0;  // fraction of the frame
  std::vector<LinkId> activation;
};

struct Schedule {
  std::vector<Slot> slots;
};

struct OptimizeOptions {
  double tolerance = 1e-9;  // relative, on the reduced costs
  int max_iterations = 0;   // pricing rounds; 0 = 10 (R + K)
  /// Per-activation capacities; when unset every column uses the fixed
  /// link capacities.
  SlotCapacityFn slot_capacities;
};

struct OptimizeResult {
  double theta = 0.0;  // bit/s
  Schedule schedule;
  int iterations = 0;  // pricing rounds performed
  bool converged = false;
  std::vector<double> theta_history;  // one entry per restricted solve
  LpSolution lp;
  std::vector<CapacityColumn> columns;
  OptimalityGap last_gap;
};

/// Column generation: solve the restricted master, price the links with its
/// multipliers, add the maximum-weight matching if its reduced cost is
/// negative, repeat.
inline OptimizeResult optimize(const Topology& topology, std::span<const double> capacities, std::span<const double> w,
                               const OptimizeOptions& options = {}) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("optimize: tolerance must be > 0");
  if (capacities.size() != topology.links.size()) throw std::invalid_argument("optimize: one capacity per link");
  if (w.size() != topology.num_rows()) throw std::invalid_argument("optimize: one weight per SBS/user row");
  const int max_iterations =
      options.max_iterations > 0 ? options.max_iterations : std::max(1, 10 * static_cast<int>(topology.links.size()));

  auto build = [&](std::span<const LinkId> activation) {
    if (!options.slot_capacities) return column_from_activation(activation, topology, capacities);
    const auto caps = options.slot_capacities(activation);
    return column_from_activation(activation, topology, caps);
  };

  double scale = 0.0;
  for (double c : capacities) scale = std::max(scale, std::abs(c));
  RestrictedMaster master(w, scale, options.tolerance);
  for (LinkId l = 0; l < topology.links.size(); ++l) {
    const LinkId single[] = {l};
    master.add(build(single));
  }

  OptimizeResult result;
  LpSolution lp = master.solve();
  result.theta_history.push_back(lp.theta);
  const double unit = master.scale();
  while (true) {
    if (result.iterations >= max_iterations) break;
    ++result.iterations;
    const auto weights = price_links(lp.duals, capacities, topology);
    const MatchingResult best = max_weight_matching(weights, topology);
    OptimalityGap gap = optimality_gap(lp.duals, best.value, w);
    result.last_gap = gap;
    // eta1 is in bit/s; compare it on the same O(1) scale as eta2 and eta3.
    const double normalized = std::min({gap.eta1 / unit, gap.eta2, gap.eta3});
    if (normalized >= -options.tolerance || best.links.empty()) {
      result.converged = true;
      break;
    }
    CapacityColumn candidate = build(best.links);
    if (options.slot_capacities) {
      // Priced with the interference-free bound; stop once the true column
      // no longer improves.
      double rc = -lp.duals[w.size()];
      for (std::size_t k = 0; k < w.size(); ++k) rc -= lp.duals[k] * candidate.net_rate[k];
      if (rc / unit >= -options.tolerance) {
        result.converged = true;
        break;
      }
    }
    const bool duplicate = std::any_of(master.columns().begin(), master.columns().end(),
                                       [&](const CapacityColumn& c) { return c.activation == candidate.activation; });
    if (duplicate) {
      result.converged = normalized >= -10.0 * options.tolerance;
      break;
    }
    master.add(candidate);
    lp = master.solve();
    result.theta_history.push_back(lp.theta);
  }

  result.theta = lp.theta;
  result.columns = master.columns();
  for (std::size_t i = 0; i < lp.slot_durations.size(); ++i) {
    if (lp.slot_durations[i] > 1e-12) result.schedule.slots.push_back({lp.slot_durations[i], result.columns[i].activation});
  }
  result.lp = std::move(lp);
  return result;
}

struct VerifyReport {
  double theta_achieved = 0.0;
  std::vector<double> per_node_throughput;  // per row, bit/s
  bool feasible = false;
  std::string diagnostic;
};

/// Recomputes every row throughput of `schedule` from scratch. Throws
/// std::invalid_argument for a malformed schedule (negative duration,
/// durations not summing to one, unknown link).
inline VerifyReport verify_schedule(const Schedule& schedule, const Topology& topology,
                                    std::span<const double> capacities, std::span<const double> w,
                                    const SlotCapacityFn& slot_capacities = {}) {
  validate_weights(w);
  double total = 0.0;
  for (const Slot& s : schedule.slots) {
    if (!(s.duration >= 0.0)) throw std::invalid_argument("verify_schedule: negative slot duration");
    for (LinkId l : s.activation) {
      if (l >= topology.links.size()) throw std::invalid_argument("verify_schedule: unknown link id");
    }
    total += s.duration;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("verify_schedule: slot durations sum to " + std::to_string(total) + ", not 1");
  }

  VerifyReport report;
  report.feasible = true;
  report.per_node_throughput.assign(topology.num_rows(), 0.0);
  double scale = 0.0;
  for (double c : capacities) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i < schedule.slots.size(); ++i) {
    const Slot& s = schedule.slots[i];
    if (!is_valid_activation(s.activation, topology.links)) {
      report.feasible = false;
      report.diagnostic = "slot " + std::to_string(i) + " activation is not a matching";
      continue;
    }
    std::vector<double> caps(capacities.begin(), capacities.end());
    if (slot_capacities) caps = slot_capacities(s.activation);
    for (LinkId l : s.activation) {
      const Link& link = topology.links[l];
      report.per_node_throughput[topology.row_of(link.to)] += s.duration * caps[l];
      if (!topology.is_mbs(link.from)) report.per_node_throughput[topology.row_of(link.from)] -= s.duration * caps[l];
    }
  }
  double theta = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double r = report.per_node_throughput[k];
    if (w[k] > 0.0) {
      theta = std::min(theta, r / w[k]);
    } else if (r < -1e-9 * scale) {
      report.feasible = false;
      if (report.diagnostic.empty()) report.diagnostic = "row " + std::to_string(k) + " relays more than it receives";
    }
  }
  report.theta_achieved = theta;
  if (theta < 0.0) {
    report.feasible = false;
    if (report.diagnostic.empty()) report.diagnostic = "negative throughput on a weighted row";
  }
  return report;
}

}  // namespace iabsim
