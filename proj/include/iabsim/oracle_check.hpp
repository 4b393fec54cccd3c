#pragma once

// Randomized equivalence runs: column generation against the full LP, the
// tree matching against brute force, plus the dual certificate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iabsim/channel_realization.hpp"
#include "iabsim/experiment.hpp"
#include "iabsim/matching.hpp"
#include "iabsim/reference_oracle.hpp"
#include "iabsim/schedule_optimizer.hpp"

namespace iabsim::oracle {

struct CheckReport {
  int instances = 0;
  int lp_mismatches = 0;
  int certificate_failures = 0;
  int not_converged = 0;
  int matching_checks = 0;
  int matching_mismatches = 0;
  double worst_relative_gap = 0.0;
  std::vector<std::string> failures;  // one line per failing instance

  bool passed() const {
    return lp_mismatches == 0 && certificate_failures == 0 && not_converged == 0 && matching_mismatches == 0;
  }
};

struct RandomInstance {
  Topology topology;
  std::vector<double> capacities;
  std::vector<double> weights;
};

/// One MBS, R in [0, 3] SBSs and K in [1, 4] users, trimmed so that
/// R + K <= max_links; channel and geometry from the baseline scenario.
template <class Rng>
RandomInstance random_instance(Rng& rng, int max_links, const ScenarioConfig& base = {}) {
  std::uniform_int_distribution<int> pick_r(0, 3), pick_k(1, 4);
  DeploymentConfig dep = base.deployment;
  dep.num_mbs = 1;
  dep.mbs_layout = MbsLayout::automatic;
  dep.num_sbs = pick_r(rng);
  dep.num_users = pick_k(rng);
  while (dep.num_sbs + dep.num_users > max_links) {
    if (dep.num_sbs > 0) --dep.num_sbs;
    else --dep.num_users;
  }
  dep.num_users = std::max(1, dep.num_users);
  RandomInstance inst;
  inst.topology = build_topology(generate_deployment(dep, rng), base.channel, dep.degree_cap,
                                 dep.association_metric, base.power);
  inst.capacities = realize_channel(inst.topology, base.channel, base.antenna, base.power, rng).capacity_bps;
  inst.weights = user_weights(inst.topology);
  return inst;
}

/// Random forest over `nodes` nodes with `edges` <= nodes - 1 links and
/// weights in [-1, 1].
template <class Rng>
std::pair<std::vector<Link>, std::vector<double>> random_forest(Rng& rng, int nodes, int edges) {
  std::vector<int> order(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Link> links;
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::vector<double> w;
  for (int i = 1; i <= edges && i < nodes; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    links.push_back({order[static_cast<std::size_t>(parent(rng))], order[static_cast<std::size_t>(i)]});
    w.push_back(weight(rng));
  }
  return {links, w};
}

inline double relative_gap(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / denom;
}

inline CheckReport run_oracle_check(int instances, int max_links, std::uint64_t seed, double lp_tol = 1e-9,
                                    double dual_tol = 1e-8) {
  if (instances < 0) throw std::invalid_argument("oracle check: instances must be >= 0");
  if (max_links < 1 || static_cast<std::size_t>(max_links) > kMaxLinks) {
    throw std::invalid_argument("oracle check: max_links must be in [1, 20]");
  }
  CheckReport report;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    const RandomInstance inst = random_instance(rng, max_links);
    ++report.instances;
    const OptimizeResult cg = optimize(inst.topology, inst.capacities, inst.weights);
    const LpSolution full = solve_full_lp(inst.topology, inst.capacities, inst.weights);
    const double gap = relative_gap(cg.theta, full.theta);
    report.worst_relative_gap = std::max(report.worst_relative_gap, gap);
    std::ostringstream why;
    if (!cg.converged) {
      ++report.not_converged;
      why << " not converged";
    }
    if (gap > lp_tol) {
      ++report.lp_mismatches;
      why << " theta " << cg.theta << " vs full LP " << full.theta;
    }
    if (cg.converged && !dual_feasibility_check(cg.lp.duals, inst.capacities, inst.topology, inst.weights, dual_tol)) {
      ++report.certificate_failures;
      why << " dual certificate failed";
    }

    const int edges = std::min(12, static_cast<int>(inst.topology.links.size()) + 4);
    const auto [links, w] = random_forest(rng, edges + 1, edges);
    const double tree = max_weight_matching(w, links, static_cast<std::size_t>(edges + 1)).value;
    const double brute = brute_force_matching(w, links).value;
    ++report.matching_checks;
    if (tree != brute) {
      ++report.matching_mismatches;
      why << " matching " << tree << " vs " << brute;
    }
    if (!why.str().empty()) report.failures.push_back("instance " + std::to_string(i) + ":" + why.str());
  }
  return report;
}

}  // namespace iabsim::oracle
