#pragma once

// Node placement, degree-capped backhaul forest, user association and the
// directed link list of a multi-hop IAB network.
//
// Node ids are contiguous and grouped by kind: MBSs occupy [0, M), SBSs
// [M, M+R) and users [M+R, M+R+K). Every non-MBS node has exactly one
// incoming link, so the R+K links sorted by child id are indexed by
// `child - M`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iabsim/channel_model.hpp"

namespace iabsim {

using NodeId = int;
using LinkId = std::size_t;
inline constexpr NodeId kNoNode = -1;

enum class NodeKind { mbs, sbs, user };

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Node {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::user;
  Position position;

  bool is_bs() const { return kind != NodeKind::user; }
};

struct Link {
  NodeId from = kNoNode;
  NodeId to = kNoNode;

  friend bool operator==(const Link&, const Link&) = default;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MbsLayout { automatic, center, two_symmetric, four_quadrant, explicit_list };

enum class AssociationMetric {
  rx_power,  // transmit power times mean path gain
  pathloss,  // mean path gain only
};

struct TxPower {
  double mbs_dbm = 40.0;
  double sbs_dbm = 30.0;

  double watts(NodeKind kind) const { return dbm_to_watts(kind == NodeKind::mbs ? mbs_dbm : sbs_dbm); }
};

struct DeploymentConfig {
  double area_side_m = 400.0;
  int num_mbs = 1;
  int num_sbs = 2;
  int num_users = 10;
  int degree_cap = 2;
  MbsLayout mbs_layout = MbsLayout::automatic;
  std::vector<Position> mbs_positions;  // used by MbsLayout::explicit_list
  AssociationMetric association_metric = AssociationMetric::rx_power;

  int num_nodes() const { return num_mbs + num_sbs + num_users; }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("deployment invariant violated: ") + what);
    };
    require(area_side_m > 0.0, "area_side_m > 0");
    require(num_mbs >= 1, "num_mbs >= 1");
    require(num_sbs >= 0, "num_sbs >= 0");
    require(num_users >= 1, "num_users >= 1");
    require(degree_cap >= 1, "degree_cap >= 1");
  }
};

/// Fixed MBS coordinates for a layout. Throws std::invalid_argument when the
/// layout cannot hold `config.num_mbs` stations.
inline std::vector<Position> mbs_positions(const DeploymentConfig& config) {
  const double s = config.area_side_m;
  MbsLayout layout = config.mbs_layout;
  if (layout == MbsLayout::automatic) {
    switch (config.num_mbs) {
      case 1: layout = MbsLayout::center; break;
      case 2: layout = MbsLayout::two_symmetric; break;
      case 4: layout = MbsLayout::four_quadrant; break;
      default:
        throw std::invalid_argument("mbs_layout=auto supports num_mbs in {1, 2, 4}; use an explicit list");
    }
  }
  auto expect = [&](int n, const char* name) {
    if (config.num_mbs != n) {
      throw std::invalid_argument(std::string("mbs_layout ") + name + " requires num_mbs = " + std::to_string(n));
    }
  };
  switch (layout) {
    case MbsLayout::center:
      expect(1, "center");
      return {{s / 2, s / 2}};
    case MbsLayout::two_symmetric:
      expect(2, "two-symmetric");
      return {{s / 4, s / 2}, {3 * s / 4, s / 2}};
    case MbsLayout::four_quadrant:
      expect(4, "four-quadrant");
      return {{s / 4, s / 4}, {3 * s / 4, s / 4}, {s / 4, 3 * s / 4}, {3 * s / 4, 3 * s / 4}};
    case MbsLayout::explicit_list:
      if (static_cast<int>(config.mbs_positions.size()) != config.num_mbs) {
        throw std::invalid_argument("explicit MBS position list length differs from num_mbs");
      }
      return config.mbs_positions;
    case MbsLayout::automatic:
      break;
  }
  throw std::logic_error("unreachable MBS layout");
}

/// MBSs at their layout positions, SBSs and users i.i.d. uniform over the
/// square. SBSs are drawn before users.
template <class Rng>
std::vector<Node> generate_deployment(const DeploymentConfig& config, Rng& rng) {
  config.validate();
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(config.num_nodes()));
  for (const auto& p : mbs_positions(config)) {
    nodes.push_back({static_cast<NodeId>(nodes.size()), NodeKind::mbs, p});
  }
  std::uniform_real_distribution<double> coord(0.0, config.area_side_m);
  auto place = [&](NodeKind kind, int count) {
    for (int i = 0; i < count; ++i) {
      const double x = coord(rng);
      const double y = coord(rng);
      nodes.push_back({static_cast<NodeId>(nodes.size()), kind, {x, y}});
    }
  };
  place(NodeKind::sbs, config.num_sbs);
  place(NodeKind::user, config.num_users);
  return nodes;
}

/// Expected linear path gain over the LOS state at zero shadowing. Distances
/// below 1 m are clamped to 1 m.
inline double mean_path_loss(const Node& m, const Node& k, const ChannelParams& params) {
  const double d = std::max(1.0, distance(m.position, k.position));
  const double p_los = los_probability(d, params.beta);
  const double los_gain = db_to_linear(-path_loss_db(d, true, 0.0, params));
  const double nlos_gain = db_to_linear(-path_loss_db(d, false, 0.0, params));
  return p_los * los_gain + (1.0 - p_los) * nlos_gain;
}

/// Serving BS per node id (kNoNode for base stations). Each user joins the
/// BS with the largest association metric; ties go to the lowest BS id.
inline std::vector<NodeId> associate_users(std::span<const Node> nodes, const ChannelParams& params,
                                           AssociationMetric metric = AssociationMetric::rx_power,
                                           const TxPower& power = {}) {
  std::vector<NodeId> serving(nodes.size(), kNoNode);
  bool any_bs = std::any_of(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_bs(); });
  if (!any_bs) throw TopologyError("associate_users: no base station available");
  for (const auto& user : nodes) {
    if (user.is_bs()) continue;
    double best = -1.0;
    NodeId best_id = kNoNode;
    for (const auto& bs : nodes) {
      if (!bs.is_bs()) continue;
      double score = mean_path_loss(bs, user, params);
      if (metric == AssociationMetric::rx_power) score *= power.watts(bs.kind);
      if (score > best || (score == best && bs.id < best_id)) {
        best = score;
        best_id = bs.id;
      }
    }
    serving[static_cast<std::size_t>(user.id)] = best_id;
  }
  return serving;
}

/// Greedy global-best growth of the backhaul forest from the MBSs: at each
/// step the unconnected SBS with the largest mean path gain to a connected
/// BS that still has fewer than `degree_cap` SBS children is attached.
/// Ties go to the lowest SBS id, then the lowest parent id. Returns the
/// parent per node id (kNoNode for MBSs and users).
inline std::vector<NodeId> build_backhaul_forest(std::span<const Node> nodes, const ChannelParams& params,
                                                 int degree_cap) {
  if (degree_cap < 1) throw std::invalid_argument("build_backhaul_forest: degree_cap must be >= 1");
  NodeId max_id = -1;
  for (const auto& n : nodes) max_id = std::max(max_id, n.id);
  std::vector<const Node*> by_id(static_cast<std::size_t>(max_id + 1), nullptr);
  for (const auto& n : nodes) by_id[static_cast<std::size_t>(n.id)] = &n;

  std::vector<NodeId> parent(by_id.size(), kNoNode);
  std::vector<int> children(by_id.size(), 0);
  std::vector<bool> connected(by_id.size(), false);
  std::vector<NodeId> pending;
  bool any_mbs = false;
  for (const Node* n : by_id) {
    if (n == nullptr) continue;
    if (n->kind == NodeKind::mbs) {
      connected[static_cast<std::size_t>(n->id)] = true;
      any_mbs = true;
    } else if (n->kind == NodeKind::sbs) {
      pending.push_back(n->id);
    }
  }
  if (!any_mbs && !pending.empty()) throw TopologyError("build_backhaul_forest: no MBS to root the forest");

  while (!pending.empty()) {
    double best = -1.0;
    std::size_t best_pending = 0;
    NodeId best_parent = kNoNode;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const Node& sbs = *by_id[static_cast<std::size_t>(pending[i])];
      for (const Node* bs : by_id) {
        if (bs == nullptr || !bs->is_bs()) continue;
        const auto b = static_cast<std::size_t>(bs->id);
        if (!connected[b] || children[b] >= degree_cap) continue;
        const double gain = mean_path_loss(*bs, sbs, params);
        // pending and by_id are both in ascending id order, so strict '>'
        // keeps the lowest (sbs, parent) pair among ties.
        if (gain > best) {
          best = gain;
          best_pending = i;
          best_parent = bs->id;
        }
      }
    }
    if (best_parent == kNoNode) {
      throw TopologyError("build_backhaul_forest: no connected BS with spare capacity for SBS " +
                          std::to_string(pending.front()) + " (degree_cap=" + std::to_string(degree_cap) + ")");
    }
    const NodeId child = pending[best_pending];
    parent[static_cast<std::size_t>(child)] = best_parent;
    children[static_cast<std::size_t>(best_parent)] += 1;
    connected[static_cast<std::size_t>(child)] = true;
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pending));
  }
  return parent;
}

struct Topology {
  std::vector<Node> nodes;
  std::vector<NodeId> parent;  // per node id; kNoNode for MBSs
  int degree_cap = 2;
  std::vector<Link> links;     // R + K links, sorted by child id

  int num_mbs() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const Node& n) { return n.kind == NodeKind::mbs; }));
  }
  int num_sbs() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const Node& n) { return n.kind == NodeKind::sbs; }));
  }
  int num_users() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const Node& n) { return n.kind == NodeKind::user; }));
  }
  std::size_t num_nodes() const { return nodes.size(); }
  /// Number of throughput rows: one per SBS and user.
  std::size_t num_rows() const { return nodes.size() - static_cast<std::size_t>(num_mbs()); }
  /// Row of a non-MBS node in the capacity matrix.
  std::size_t row_of(NodeId id) const { return static_cast<std::size_t>(id - num_mbs()); }
  const Node& node(NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }
  bool is_mbs(NodeId id) const { return node(id).kind == NodeKind::mbs; }
};

/// One backhaul link per SBS (parent -> SBS) and one access link per user
/// (serving BS -> user), sorted by child id.
inline std::vector<Link> enumerate_links(std::span<const Node> nodes, std::span<const NodeId> sbs_parent,
                                         std::span<const NodeId> serving) {
  std::vector<Link> links;
  for (const auto& n : nodes) {
    const auto i = static_cast<std::size_t>(n.id);
    if (n.kind == NodeKind::sbs) {
      if (i >= sbs_parent.size() || sbs_parent[i] == kNoNode) {
        throw TopologyError("enumerate_links: SBS " + std::to_string(n.id) + " has no backhaul parent");
      }
      links.push_back({sbs_parent[i], n.id});
    } else if (n.kind == NodeKind::user) {
      if (i >= serving.size() || serving[i] == kNoNode) {
        throw TopologyError("enumerate_links: user " + std::to_string(n.id) + " is not associated");
      }
      links.push_back({serving[i], n.id});
    }
  }
  std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) { return a.to < b.to; });
  return links;
}

/// Checks ids, kind grouping, forest structure, degree cap and link count.
inline void validate_topology(const Topology& t) {
  const auto n = t.nodes.size();
  auto fail = [](const std::string& what) { throw TopologyError("invalid topology: " + what); };
  if (t.parent.size() != n) fail("parent map size differs from node count");
  for (std::size_t i = 0; i < n; ++i) {
    if (t.nodes[i].id != static_cast<NodeId>(i)) fail("node ids must be contiguous from 0");
    if (i > 0 && static_cast<int>(t.nodes[i].kind) < static_cast<int>(t.nodes[i - 1].kind)) {
      fail("nodes must be ordered MBS, SBS, user");
    }
  }
  std::vector<int> sbs_children(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId p = t.parent[i];
    if (t.nodes[i].kind == NodeKind::mbs) {
      if (p != kNoNode) fail("MBS " + std::to_string(i) + " has a parent");
      continue;
    }
    if (p < 0 || static_cast<std::size_t>(p) >= n || !t.nodes[static_cast<std::size_t>(p)].is_bs()) {
      fail("node " + std::to_string(i) + " lacks a BS parent");
    }
    if (t.nodes[i].kind == NodeKind::sbs) sbs_children[static_cast<std::size_t>(p)] += 1;
    // Walk to the root; a cycle would exceed n steps.
    NodeId cur = static_cast<NodeId>(i);
    std::size_t steps = 0;
    while (t.parent[static_cast<std::size_t>(cur)] != kNoNode) {
      cur = t.parent[static_cast<std::size_t>(cur)];
      if (++steps > n) fail("parent structure has a cycle");
    }
    if (t.nodes[static_cast<std::size_t>(cur)].kind != NodeKind::mbs) fail("tree not rooted at an MBS");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (sbs_children[i] > t.degree_cap) fail("BS " + std::to_string(i) + " exceeds the degree cap");
  }
  if (t.links.size() != t.num_rows()) fail("link count differs from R + K");
  for (std::size_t l = 0; l < t.links.size(); ++l) {
    const Link& link = t.links[l];
    if (link.to != static_cast<NodeId>(l) + t.num_mbs()) fail("links must be sorted by child id");
    if (t.parent[static_cast<std::size_t>(link.to)] != link.from) fail("link disagrees with parent map");
  }
}

/// Forest + association + links for a placed node set.
inline Topology build_topology(std::vector<Node> nodes, const ChannelParams& params, int degree_cap,
                               AssociationMetric metric = AssociationMetric::rx_power, const TxPower& power = {}) {
  Topology t;
  t.degree_cap = degree_cap;
  const auto sbs_parent = build_backhaul_forest(nodes, params, degree_cap);
  const auto serving = associate_users(nodes, params, metric, power);
  t.links = enumerate_links(nodes, sbs_parent, serving);
  t.parent.assign(nodes.size(), kNoNode);
  for (const auto& link : t.links) t.parent[static_cast<std::size_t>(link.to)] = link.from;
  t.nodes = std::move(nodes);
  validate_topology(t);
  return t;
}

/// True iff no node appears in two links of the set, i.e. the set is a
/// matching. This covers both the one-link-per-BS TDMA rule and half duplex.
inline bool is_valid_activation(std::span<const LinkId> activation, std::span<const Link> links) {
  std::vector<NodeId> touched;
  touched.reserve(2 * activation.size());
  for (LinkId id : activation) {
    if (id >= links.size()) return false;
    touched.push_back(links[id].from);
    touched.push_back(links[id].to);
  }
  std::sort(touched.begin(), touched.end());
  return std::adjacent_find(touched.begin(), touched.end()) == touched.end();
}

inline const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::mbs: return "MBS";
    case NodeKind::sbs: return "SBS";
    case NodeKind::user: return "USER";
  }
  return "?";
}

}  // namespace iabsim
