#pragma once

// Monte Carlo driver: per-trial deployment + channel + optimization, sweeps
// over one scenario parameter, IAB vs macro-only comparison and transmit
// antenna sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "iabsim/channel_realization.hpp"
#include "iabsim/schedule_optimizer.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

enum class NetworkMode { iab, macro_only };

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;

  bool empty() const { return parameter.empty() || values.empty(); }
};

struct ScenarioConfig {
  DeploymentConfig deployment;
  ChannelParams channel;
  AntennaConfig antenna;
  TxPower power;
  SweepSpec sweep;
  int trials = 1000;
  std::uint64_t base_seed = 1;
  NetworkMode mode = NetworkMode::iab;
  /// Keep node positions fixed across trials (channel still redrawn).
  bool fixed_deployment = false;
  /// Seed every sweep point with the same streams.
  bool common_random_numbers = false;
  double tolerance = 1e-9;
  int max_iterations = 0;  // 0 = 10 (R + K)
  int threads = 1;

  void validate() const {
    deployment.validate();
    (void)mbs_positions(deployment);  // layout vs num_mbs
    channel.validate();
    antenna.validate();
    if (trials < 1) throw std::invalid_argument("scenario invariant violated: trials >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("scenario invariant violated: tolerance > 0");
    if (max_iterations < 0) throw std::invalid_argument("scenario invariant violated: max_iterations >= 0");
    if (threads < 1) throw std::invalid_argument("scenario invariant violated: threads >= 1");
  }
};

inline const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {
      "p_mbs_dbm",       "p_sbs_dbm",       "beta",           "num_mbs",          "num_sbs",
      "num_users",       "degree_cap",      "area_side_m",    "alpha_los",        "alpha_nlos",
      "sigma_los_db",    "sigma_nlos_db",   "n_los",          "n_nlos",           "main_gain_tx_db",
      "side_gain_tx_db", "main_gain_rx_db", "side_gain_rx_db", "beamwidth_tx_deg", "beamwidth_rx_deg",
      "carrier_frequency_hz", "bandwidth_hz", "noise_figure_db"};
  return names;
}

/// Sets one named scenario parameter. Throws std::invalid_argument for an
/// unknown name or a non-integral value of an integer parameter.
inline void apply_parameter(ScenarioConfig& c, const std::string& name, double value) {
  auto as_int = [&]() {
    if (value != std::floor(value)) throw std::invalid_argument("parameter " + name + " needs an integer value");
    return static_cast<int>(value);
  };
  if (name == "p_mbs_dbm") c.power.mbs_dbm = value;
  else if (name == "p_sbs_dbm") c.power.sbs_dbm = value;
  else if (name == "beta") c.channel.beta = value;
  else if (name == "num_mbs") c.deployment.num_mbs = as_int();
  else if (name == "num_sbs") c.deployment.num_sbs = as_int();
  else if (name == "num_users") c.deployment.num_users = as_int();
  else if (name == "degree_cap") c.deployment.degree_cap = as_int();
  else if (name == "area_side_m") c.deployment.area_side_m = value;
  else if (name == "alpha_los") c.channel.alpha_los = value;
  else if (name == "alpha_nlos") c.channel.alpha_nlos = value;
  else if (name == "sigma_los_db") c.channel.sigma_los_db = value;
  else if (name == "sigma_nlos_db") c.channel.sigma_nlos_db = value;
  else if (name == "n_los") c.channel.n_los = value;
  else if (name == "n_nlos") c.channel.n_nlos = value;
  else if (name == "main_gain_tx_db") c.antenna.main_gain_tx_db = value;
  else if (name == "side_gain_tx_db") c.antenna.side_gain_tx_db = value;
  else if (name == "main_gain_rx_db") c.antenna.main_gain_rx_db = value;
  else if (name == "side_gain_rx_db") c.antenna.side_gain_rx_db = value;
  else if (name == "beamwidth_tx_deg") c.antenna.beamwidth_tx_rad = deg_to_rad(value);
  else if (name == "beamwidth_rx_deg") c.antenna.beamwidth_rx_rad = deg_to_rad(value);
  else if (name == "carrier_frequency_hz") c.channel.carrier_frequency_hz = value;
  else if (name == "bandwidth_hz") c.channel.bandwidth_hz = value;
  else if (name == "noise_figure_db") c.channel.noise_figure_db = value;
  else throw std::invalid_argument("unknown sweep parameter: " + name);
}

/// splitmix64 finalizer; mixes (base, a, b, stream) into one 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  h = mix(h ^ a);
  h = mix(h ^ b);
  return mix(h ^ stream);
}

struct TrialResult {
  double theta = 0.0;  // bit/s
  int mbs_associations = 0;
  int users = 0;
  int iterations = 0;
  bool converged = false;
  std::string error;  // non-empty when the trial threw
};

/// Everything a single trial produces, for callers that want the schedule.
struct TrialDetail {
  Topology topology;
  ChannelRealization channel;
  std::vector<double> weights;
  OptimizeResult result;
};

inline TrialDetail run_trial_detail(const ScenarioConfig& config, std::uint64_t sweep_index,
                                    std::uint64_t trial_index) {
  DeploymentConfig dep = config.deployment;
  if (config.mode == NetworkMode::macro_only) dep.num_sbs = 0;
  std::mt19937_64 placement_rng(
      derive_seed(config.base_seed, sweep_index, config.fixed_deployment ? 0 : trial_index, 0));
  std::mt19937_64 channel_rng(derive_seed(config.base_seed, sweep_index, trial_index, 1));

  TrialDetail d;
  d.topology = build_topology(generate_deployment(dep, placement_rng), config.channel, dep.degree_cap,
                              dep.association_metric, config.power);
  d.channel = realize_channel(d.topology, config.channel, config.antenna, config.power, channel_rng);
  d.weights = user_weights(d.topology);
  OptimizeOptions opt;
  opt.tolerance = config.tolerance;
  opt.max_iterations = config.max_iterations;
  if (config.channel.capacity_model == CapacityModel::per_activation) {
    const Topology* t = &d.topology;
    const ChannelRealization* ch = &d.channel;
    opt.slot_capacities = [t, ch](std::span<const LinkId> act) { return activation_capacities(*t, *ch, act); };
  }
  d.result = optimize(d.topology, d.channel.capacity_bps, d.weights, opt);
  return d;
}

/// One Monte Carlo trial. The RNG streams depend only on (base_seed,
/// sweep_index, trial_index).
inline TrialResult run_trial(const ScenarioConfig& config, std::uint64_t sweep_index, std::uint64_t trial_index) {
  TrialResult r;
  try {
    const TrialDetail d = run_trial_detail(config, sweep_index, trial_index);
    r.theta = d.result.theta;
    r.converged = d.result.converged;
    r.iterations = d.result.iterations;
    for (const Node& n : d.topology.nodes) {
      if (n.kind != NodeKind::user) continue;
      ++r.users;
      if (d.topology.is_mbs(d.topology.parent[static_cast<std::size_t>(n.id)])) ++r.mbs_associations;
    }
  } catch (const lp::SolverError& e) {
    r.converged = false;
    r.error = e.what();
  }
  return r;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct SweepPoint {
  double value = 0.0;
  double mean_theta_bps = 0.0;
  double stderr_theta_bps = std::numeric_limits<double>::quiet_NaN();  // NaN when < 2 trials
  double mbs_assoc_prob = 0.0;
  int trials_ok = 0;
  int trials_failed = 0;
};

/// Runs `count` trials, possibly on several threads, and returns them in
/// trial order.
inline std::vector<TrialResult> run_trials(const ScenarioConfig& config, std::uint64_t sweep_index, int count) {
  std::vector<TrialResult> results(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(config.threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = run_trial(config, sweep_index, static_cast<std::uint64_t>(i));
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next++; i < count; i = next++) {
        results[static_cast<std::size_t>(i)] = run_trial(config, sweep_index, static_cast<std::uint64_t>(i));
      }
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

/// Mean, standard error and MBS association fraction over converged trials,
/// accumulated in trial order.
inline SweepPoint aggregate(double value, const std::vector<TrialResult>& trials) {
  SweepPoint p;
  p.value = value;
  CompensatedSum theta_sum;
  long assoc = 0, users = 0;
  for (const auto& t : trials) {
    if (!t.converged) {
      ++p.trials_failed;
      continue;
    }
    ++p.trials_ok;
    theta_sum.add(t.theta);
    assoc += t.mbs_associations;
    users += t.users;
  }
  if (p.trials_ok == 0) {
    p.mean_theta_bps = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  p.mean_theta_bps = theta_sum.value() / p.trials_ok;
  p.mbs_assoc_prob = users > 0 ? static_cast<double>(assoc) / static_cast<double>(users) : 0.0;
  if (p.trials_ok >= 2) {
    CompensatedSum sq;
    for (const auto& t : trials) {
      if (t.converged) sq.add((t.theta - p.mean_theta_bps) * (t.theta - p.mean_theta_bps));
    }
    p.stderr_theta_bps = std::sqrt(sq.value() / (p.trials_ok - 1)) / std::sqrt(static_cast<double>(p.trials_ok));
  }
  return p;
}

inline std::vector<SweepPoint> sweep(const ScenarioConfig& config) {
  config.validate();
  if (config.sweep.empty()) throw std::invalid_argument("sweep: no sweep parameter/values configured");
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < config.sweep.values.size(); ++i) {
    ScenarioConfig point = config;
    apply_parameter(point, config.sweep.parameter, config.sweep.values[i]);
    point.validate();
    const std::uint64_t stream = config.common_random_numbers ? 0 : i;
    out.push_back(aggregate(config.sweep.values[i], run_trials(point, stream, point.trials)));
  }
  return out;
}

struct CompareReport {
  std::vector<SweepPoint> iab;
  std::vector<SweepPoint> macro_only;
  std::optional<double> crossover_p_mbs_dbm;  // first value where macro-only wins
};

/// Runs both network modes over the same MBS power values.
inline CompareReport compare_iab_macro(const ScenarioConfig& config, const std::vector<double>& p_mbs_values) {
  ScenarioConfig c = config;
  c.sweep = {"p_mbs_dbm", p_mbs_values};
  CompareReport r;
  c.mode = NetworkMode::iab;
  r.iab = sweep(c);
  c.mode = NetworkMode::macro_only;
  r.macro_only = sweep(c);
  for (std::size_t i = 0; i < p_mbs_values.size(); ++i) {
    if (r.macro_only[i].mean_theta_bps > r.iab[i].mean_theta_bps) {
      r.crossover_p_mbs_dbm = p_mbs_values[i];
      break;
    }
  }
  return r;
}

struct AntennaPoint {
  double main_gain_tx_db = 0.0;
  double beamwidth_tx_deg = 0.0;
  SweepPoint stats;
};

/// Mean theta per (transmit main-lobe gain, transmit beamwidth) pair. Side
/// lobes and the receiver pattern stay as configured. All points share the
/// same random streams, so differences between points come only from the
/// antenna pattern.
inline std::vector<AntennaPoint> antenna_sweep(const ScenarioConfig& config, const std::vector<double>& main_gain_values,
                                               const std::vector<double>& beamwidth_deg_values) {
  config.validate();
  std::vector<AntennaPoint> out;
  for (double bw : beamwidth_deg_values) {
    for (double gain : main_gain_values) {
      ScenarioConfig c = config;
      c.antenna.main_gain_tx_db = gain;
      c.antenna.beamwidth_tx_rad = deg_to_rad(bw);
      c.validate();
      out.push_back({gain, bw, aggregate(gain, run_trials(c, 0, c.trials))});
    }
  }
  return out;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << v;
  return os.str();
}

inline void write_csv_header(std::ostream& os, bool with_mode = false) {
  if (with_mode) os << "mode,";
  os << "sweep_value,mean_theta_bps,stderr_theta_bps,mbs_assoc_prob,trials_ok,trials_failed\n";
}

inline void write_csv_row(std::ostream& os, const SweepPoint& p, const char* mode = nullptr) {
  if (mode != nullptr) os << mode << ',';
  os << format_number(p.value) << ',' << format_number(p.mean_theta_bps) << ',' << format_number(p.stderr_theta_bps)
     << ',' << format_number(p.mbs_assoc_prob) << ',' << p.trials_ok << ',' << p.trials_failed << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  write_csv_header(os);
  for (const auto& p : points) write_csv_row(os, p);
}

}  // namespace iabsim
