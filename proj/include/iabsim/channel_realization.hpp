#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "iabsim/channel_model.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

/// Random state of one transmitter -> receiver path, static within a frame.
struct PathDraw {
  bool is_los = true;
  double shadowing_db = 0.0;
  double path_loss_linear = 0.0;  // l, in (0, 1]
  double fading_gain = 1.0;       // g
  double interferer_gain = 1.0;   // D, used only when the path interferes
};

/// One Monte Carlo draw of every BS -> node path in a topology, plus the
/// resulting per-link capacities.
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(std::size_t num_nodes, std::size_t num_bs)
      : num_nodes_(num_nodes), num_bs_(num_bs), paths_(num_nodes * num_bs), tx_power_w_(num_bs, 0.0) {}

  const PathDraw& path(NodeId tx, NodeId rx) const { return paths_[index(tx, rx)]; }
  PathDraw& path(NodeId tx, NodeId rx) { return paths_[index(tx, rx)]; }

  double tx_power_w(NodeId bs) const { return tx_power_w_[static_cast<std::size_t>(bs)]; }
  void set_tx_power_w(NodeId bs, double watts) { tx_power_w_[static_cast<std::size_t>(bs)] = watts; }

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_bs() const { return num_bs_; }

  double noise_w = 0.0;
  double bandwidth_hz = 0.0;
  AntennaConfig antenna;

  /// Capacity per link (bit/s), ordered like Topology::links.
  std::vector<double> capacity_bps;

  /// Capacity of `link` when exactly the BSs in `interferers` transmit
  /// alongside it.
  double capacity_with(const Link& link, std::span<const NodeId> interferers) const {
    std::vector<InterferingPath> paths;
    paths.reserve(interferers.size());
    for (NodeId j : interferers) {
      if (j == link.from || j == link.to) continue;
      const PathDraw& p = path(j, link.to);
      paths.push_back({tx_power_w(j), p.interferer_gain, p.fading_gain, p.path_loss_linear});
    }
    const PathDraw& d = path(link.from, link.to);
    const double s = sinr(tx_power_w(link.from), d.fading_gain, d.path_loss_linear, paths, noise_w, antenna);
    return link_capacity(s, bandwidth_hz);
  }

 private:
  std::size_t index(NodeId tx, NodeId rx) const {
    return static_cast<std::size_t>(tx) * num_nodes_ + static_cast<std::size_t>(rx);
  }

  std::size_t num_nodes_ = 0;
  std::size_t num_bs_ = 0;
  std::vector<PathDraw> paths_;
  std::vector<double> tx_power_w_;
};

/// BSs that can transmit in the same slot as `link`: any BS other than the
/// link's endpoints that has a child besides the link's transmitter. With
/// all of them active the capacity is a lower bound for every matching that
/// contains the link.
inline std::vector<NodeId> potential_interferers(const Topology& topology, const Link& link) {
  std::vector<NodeId> out;
  for (const Link& other : topology.links) {
    const NodeId j = other.from;
    if (j == link.from || j == link.to || other.to == link.from) continue;
    out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Draws LOS state, shadowing, fading and interferer array gain for every
/// BS -> node path, then fills the link capacities under the configured
/// capacity model. Backhaul links of the forest are forced LOS. Every path
/// consumes the same random draws regardless of parameter values.
template <class Rng>
ChannelRealization realize_channel(const Topology& topology, const ChannelParams& params,
                                   const AntennaConfig& antenna, const TxPower& power, Rng& rng) {
  params.validate();
  antenna.validate();
  const std::size_t n = topology.num_nodes();
  const std::size_t num_bs = static_cast<std::size_t>(topology.num_mbs() + topology.num_sbs());
  ChannelRealization ch(n, num_bs);
  ch.noise_w = params.noise_watts();
  ch.bandwidth_hz = params.bandwidth_hz;
  ch.antenna = antenna;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t j = 0; j < num_bs; ++j) {
    const Node& tx = topology.nodes[j];
    ch.set_tx_power_w(tx.id, power.watts(tx.kind));
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const Node& rx = topology.nodes[k];
      const double d = std::max(1.0, distance(tx.position, rx.position));
      const bool backhaul = rx.kind == NodeKind::sbs && topology.parent[k] == tx.id;
      PathDraw& p = ch.path(tx.id, rx.id);
      const double u = unit(rng);
      p.is_los = backhaul || u < los_probability(d, params.beta);
      p.shadowing_db = sample_shadowing(p.is_los, params, rng);
      p.path_loss_linear = std::min(1.0, db_to_linear(-path_loss_db(d, p.is_los, p.shadowing_db, params)));
      p.fading_gain = sample_fading(p.is_los, params, rng);
      p.interferer_gain = sample_interferer_gain(antenna, rng);
    }
  }

  ch.capacity_bps.resize(topology.links.size());
  for (std::size_t l = 0; l < topology.links.size(); ++l) {
    const Link& link = topology.links[l];
    if (params.capacity_model == CapacityModel::conservative) {
      ch.capacity_bps[l] = ch.capacity_with(link, potential_interferers(topology, link));
    } else {
      ch.capacity_bps[l] = ch.capacity_with(link, {});
    }
  }
  return ch;
}

/// Per-link capacities for one slot under the per-activation model: only
/// the transmitters of `activation` interfere.
inline std::vector<double> activation_capacities(const Topology& topology, const ChannelRealization& channel,
                                                 std::span<const LinkId> activation) {
  std::vector<NodeId> transmitters;
  for (LinkId id : activation) transmitters.push_back(topology.links[id].from);
  std::vector<double> caps(topology.links.size(), 0.0);
  for (LinkId id : activation) caps[id] = channel.capacity_with(topology.links[id], transmitters);
  return caps;
}

}  // namespace iabsim
