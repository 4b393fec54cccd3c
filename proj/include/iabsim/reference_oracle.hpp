#pragma once

// Slow exhaustive counterparts of the optimizer pieces, for small instances.
// Matching enumeration and brute-force matching share no code with the
// forest DP; the full LP shares only the simplex kernel, not the pricing
// loop.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "iabsim/schedule_optimizer.hpp"
#include "iabsim/topology.hpp"

namespace iabsim::oracle {

inline constexpr std::size_t kMaxLinks = 20;

/// Every matching of the link graph, the empty one first. Recursive
/// include/exclude over links in id order, pruning on shared endpoints.
inline std::vector<std::vector<LinkId>> enumerate_matchings(std::span<const Link> links) {
  if (links.size() > kMaxLinks) throw std::length_error("enumerate_matchings: refusing more than 20 links");
  std::vector<std::vector<LinkId>> out;
  std::vector<LinkId> current;
  std::vector<NodeId> used;
  auto recurse = [&](auto&& self, LinkId next) -> void {
    if (next == links.size()) {
      out.push_back(current);
      return;
    }
    self(self, next + 1);
    const Link& l = links[next];
    if (std::find(used.begin(), used.end(), l.from) != used.end()) return;
    if (std::find(used.begin(), used.end(), l.to) != used.end()) return;
    current.push_back(next);
    used.push_back(l.from);
    used.push_back(l.to);
    self(self, next + 1);
    used.resize(used.size() - 2);
    current.pop_back();
  };
  recurse(recurse, 0);
  return out;
}

/// Argmax of total weight over all matchings; ties go to the
/// lexicographically smallest link-id set.
inline MatchingResult brute_force_matching(std::span<const double> weights, std::span<const Link> links) {
  if (weights.size() != links.size()) throw std::invalid_argument("brute_force_matching: one weight per link");
  MatchingResult best;
  bool first = true;
  for (const auto& m : enumerate_matchings(links)) {
    const double v = matching_value(m, weights);
    if (first || v > best.value || (v == best.value && m < best.links)) {
      best.links = m;
      best.value = v;
      first = false;
    }
  }
  return best;
}

/// Net rate per SBS/user row of an activation, computed directly.
inline std::vector<double> net_rates(std::span<const LinkId> activation, const Topology& topology,
                                     std::span<const double> capacities) {
  const int m = topology.num_mbs();
  std::vector<double> r(topology.num_rows(), 0.0);
  for (LinkId l : activation) {
    const Link& link = topology.links[l];
    r[static_cast<std::size_t>(link.to - m)] += capacities[l];
    if (link.from >= m) r[static_cast<std::size_t>(link.from - m)] -= capacities[l];
  }
  return r;
}

/// The master problem with every matching (including the idle slot) as a
/// column, solved once.
inline LpSolution solve_full_lp(const Topology& topology, std::span<const double> capacities,
                                std::span<const double> w, double tolerance = 1e-9) {
  double scale = 0.0;
  for (double c : capacities) scale = std::max(scale, std::abs(c));
  RestrictedMaster master(w, scale, tolerance);
  for (const auto& m : enumerate_matchings(topology.links)) {
    master.add(CapacityColumn{m, net_rates(m, topology, capacities)});
  }
  return master.solve();
}

/// True iff `duals` (node rows then frame row) price every matching column,
/// the theta column and every surplus column at a reduced cost >= -tolerance.
/// Schedule-column reduced costs are measured in units of the largest link
/// capacity.
inline bool dual_feasibility_check(std::span<const double> duals, std::span<const double> capacities,
                                   const Topology& topology, std::span<const double> w, double tolerance) {
  const std::size_t rows = topology.num_rows();
  if (duals.size() != rows + 1 || w.size() != rows) throw std::invalid_argument("dual_feasibility_check: size mismatch");
  double scale = 0.0;
  for (double c : capacities) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) scale = 1.0;
  for (const auto& m : enumerate_matchings(topology.links)) {
    const auto r = net_rates(m, topology, capacities);
    double rc = -duals[rows];
    for (std::size_t k = 0; k < rows; ++k) rc -= duals[k] * r[k];
    if (rc / scale < -tolerance) return false;
  }
  double theta_rc = -1.0;
  for (std::size_t k = 0; k < rows; ++k) theta_rc += duals[k] * w[k];
  if (theta_rc < -tolerance) return false;
  for (std::size_t k = 0; k < rows; ++k) {
    if (duals[k] < -tolerance) return false;
  }
  return true;
}

}  // namespace iabsim::oracle
