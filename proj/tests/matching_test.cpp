#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "iabsim/matching.hpp"
#include "iabsim/reference_oracle.hpp"

using namespace iabsim;

namespace {

// 0 -> 1 -> 2 -> 3
const std::vector<Link> kPath = {{0, 1}, {1, 2}, {2, 3}};
// 0 -> 1, 0 -> 2
const std::vector<Link> kStar = {{0, 1}, {0, 2}};

struct RandomForest {
  std::vector<Link> links;
  std::size_t nodes = 0;
};

RandomForest random_forest(std::mt19937_64& rng, int max_edges) {
  std::uniform_int_distribution<int> edges_dist(0, max_edges);
  std::uniform_int_distribution<int> roots_dist(1, 3);
  const int roots = roots_dist(rng);
  const int edges = edges_dist(rng);
  RandomForest f;
  f.nodes = static_cast<std::size_t>(roots + edges);
  // Each new node picks any earlier node as parent.
  for (int v = roots; v < roots + edges; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    f.links.push_back({parent(rng), v});
  }
  // Shuffle node labels so parents are not always smaller ids.
  std::vector<NodeId> label(f.nodes);
  for (std::size_t i = 0; i < f.nodes; ++i) label[i] = static_cast<NodeId>(i);
  std::shuffle(label.begin(), label.end(), rng);
  for (auto& l : f.links) {
    l.from = label[static_cast<std::size_t>(l.from)];
    l.to = label[static_cast<std::size_t>(l.to)];
  }
  return f;
}

}  // namespace

TEST(MaxWeightMatching, PathOfThree) {
  const std::vector<double> w = {3, 5, 4};
  const auto m = max_weight_matching(w, kPath, 4);
  EXPECT_EQ(m.links, (std::vector<LinkId>{0, 2}));
  EXPECT_EQ(m.value, 7.0);
}

TEST(MaxWeightMatching, NonPositiveWeightsGiveEmpty) {
  const std::vector<double> w = {-1, 0, -3};
  const auto m = max_weight_matching(w, kPath, 4);
  EXPECT_TRUE(m.links.empty());
  EXPECT_EQ(m.value, 0.0);
}

TEST(MaxWeightMatching, StarPicksHeavierEdge) {
  const std::vector<double> w = {5, 3};
  const auto m = max_weight_matching(w, kStar, 3);
  EXPECT_EQ(m.links, (std::vector<LinkId>{0}));
  EXPECT_EQ(m.value, 5.0);
}

TEST(MaxWeightMatching, RejectsNonForest) {
  const std::vector<Link> two_parents = {{0, 2}, {1, 2}};
  EXPECT_THROW(max_weight_matching(std::vector<double>{1, 1}, two_parents, 3), std::invalid_argument);
  const std::vector<Link> cycle = {{0, 1}, {1, 2}, {2, 0}};
  EXPECT_THROW(max_weight_matching(std::vector<double>{1, 1, 1}, cycle, 3), std::invalid_argument);
}

TEST(MaxWeightMatching, EqualsBruteForceOnRandomForests) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> int_weight(-5, 20);
  std::normal_distribution<double> real_weight(0.5, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = random_forest(rng, 12);
    std::vector<double> w(f.links.size());
    const bool integral = trial % 2 == 0;
    for (auto& x : w) x = integral ? int_weight(rng) : real_weight(rng);
    const auto dp = max_weight_matching(w, f.links, f.nodes);
    const auto bf = oracle::brute_force_matching(w, f.links);
    EXPECT_EQ(dp.value, bf.value) << "trial " << trial;
    EXPECT_TRUE(is_valid_activation(dp.links, f.links));
  }
}
