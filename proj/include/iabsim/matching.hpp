#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "iabsim/topology.hpp"

namespace iabsim {

struct MatchingResult {
  std::vector<LinkId> links;  // ascending
  double value = 0.0;
};

/// Sum of `weights` over `links` in ascending link order. Both the tree DP
/// and the brute-force oracle report values through this so that equal sets
/// compare bit-for-bit.
inline double matching_value(std::span<const LinkId> links, std::span<const double> weights) {
  std::vector<LinkId> sorted(links.begin(), links.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (LinkId l : sorted) total += weights[l];
  return total;
}

/// Maximum-weight matching on a directed forest (every node has at most one
/// incoming link). Links with weight <= 0 are never selected.
///
/// Leaf-to-root DP: `free_[v]` is the best value in v's subtree with v not
/// matched to any child, `best_[v]` the best value with v unrestricted.
///   free_[v] = sum_c best_[c]
///   best_[v] = max(free_[v], max_c free_[v] - best_[c] + free_[c] + w(v, c))
/// Ties prefer leaving v unmatched, then the lowest link id.
inline MatchingResult max_weight_matching(std::span<const double> weights, std::span<const Link> links,
                                          std::size_t num_nodes) {
  if (weights.size() != links.size()) throw std::invalid_argument("max_weight_matching: one weight per link");
  std::vector<std::vector<LinkId>> child_links(num_nodes);
  std::vector<int> in_degree(num_nodes, 0);
  for (LinkId l = 0; l < links.size(); ++l) {
    const auto from = static_cast<std::size_t>(links[l].from);
    const auto to = static_cast<std::size_t>(links[l].to);
    if (from >= num_nodes || to >= num_nodes) throw std::invalid_argument("max_weight_matching: node out of range");
    if (++in_degree[to] > 1) throw std::invalid_argument("max_weight_matching: link graph is not a forest");
    child_links[from].push_back(l);
  }

  // Post-order from every root; nodes on a cycle are never reached.
  std::vector<std::size_t> order;
  order.reserve(num_nodes);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < num_nodes; ++root) {
    if (in_degree[root] != 0) continue;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < child_links[v].size()) {
        const auto c = static_cast<std::size_t>(links[child_links[v][next++]].to);
        stack.emplace_back(c, 0);
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  if (order.size() != num_nodes) throw std::invalid_argument("max_weight_matching: link graph has a cycle");

  std::vector<double> free_(num_nodes, 0.0), best_(num_nodes, 0.0);
  std::vector<LinkId> matched_child(num_nodes, links.size());  // links.size() means none
  for (std::size_t v : order) {
    double f = 0.0;
    for (LinkId l : child_links[v]) f += best_[static_cast<std::size_t>(links[l].to)];
    double b = f;
    for (LinkId l : child_links[v]) {
      if (!(weights[l] > 0.0)) continue;
      const auto c = static_cast<std::size_t>(links[l].to);
      const double candidate = f - best_[c] + free_[c] + weights[l];
      if (candidate > b) {
        b = candidate;
        matched_child[v] = l;
      }
    }
    free_[v] = f;
    best_[v] = b;
  }

  // Top-down reconstruction; `true` marks a node already matched to its parent.
  MatchingResult result;
  std::vector<std::pair<std::size_t, bool>> todo;
  for (std::size_t root = 0; root < num_nodes; ++root) {
    if (in_degree[root] == 0) todo.emplace_back(root, false);
  }
  while (!todo.empty()) {
    const auto [v, taken] = todo.back();
    todo.pop_back();
    const LinkId chosen = taken ? links.size() : matched_child[v];
    if (chosen != links.size()) result.links.push_back(chosen);
    for (LinkId l : child_links[v]) todo.emplace_back(static_cast<std::size_t>(links[l].to), l == chosen);
  }
  std::sort(result.links.begin(), result.links.end());
  result.value = matching_value(result.links, weights);
  return result;
}

inline MatchingResult max_weight_matching(std::span<const double> weights, const Topology& topology) {
  return max_weight_matching(weights, topology.links, topology.num_nodes());
}

}  // namespace iabsim
