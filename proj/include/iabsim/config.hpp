#pragma once

// Sectioned key = value scenario files. Every key carries its unit in the
// name; an empty file yields the baseline scenario.
//
//   [deployment]  area_side_m num_mbs num_sbs num_users degree_cap
//                 mbs_layout mbs_positions association_metric
//   [channel]     carrier_frequency_hz bandwidth_hz alpha_los alpha_nlos
//                 sigma_los_db sigma_nlos_db beta n_los n_nlos
//                 noise_psd_dbm_hz noise_figure_db fading_convention
//                 capacity_model
//   [antenna]     main_gain_tx_db side_gain_tx_db main_gain_rx_db
//                 side_gain_rx_db beamwidth_tx_deg beamwidth_rx_deg
//   [power]       p_mbs_dbm p_sbs_dbm
//   [experiment]  trials base_seed mode fixed_deployment
//                 common_random_numbers threads
//   [optimizer]   tolerance max_iterations
//   [sweep]       parameter values

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iabsim/experiment.hpp"

namespace iabsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double to_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
  return v;
}

inline long long to_integer(std::string_view text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
  return v;
}

inline bool to_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + std::string(text) + "'");
}

inline std::vector<double> to_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    const auto t = trim(item);
    if (!t.empty()) out.push_back(to_double(t));
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
  return out;
}

inline std::vector<Position> to_positions(std::string_view text) {
  std::vector<Position> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ';')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("expected 'x,y' pairs separated by ';'");
    out.push_back({to_double(trim(t.substr(0, comma))), to_double(trim(t.substr(comma + 1)))});
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto num = [](auto member) {
      return [member](ScenarioConfig& c, std::string_view v) { member(c) = to_double(v); };
    };
    auto integer = [](auto member) {
      return [member](ScenarioConfig& c, std::string_view v) { member(c) = static_cast<int>(to_integer(v)); };
    };
    m["deployment.area_side_m"] = num([](ScenarioConfig& c) -> double& { return c.deployment.area_side_m; });
    m["deployment.num_mbs"] = integer([](ScenarioConfig& c) -> int& { return c.deployment.num_mbs; });
    m["deployment.num_sbs"] = integer([](ScenarioConfig& c) -> int& { return c.deployment.num_sbs; });
    m["deployment.num_users"] = integer([](ScenarioConfig& c) -> int& { return c.deployment.num_users; });
    m["deployment.degree_cap"] = integer([](ScenarioConfig& c) -> int& { return c.deployment.degree_cap; });
    m["deployment.mbs_layout"] = [](ScenarioConfig& c, std::string_view v) {
      if (v == "auto") c.deployment.mbs_layout = MbsLayout::automatic;
      else if (v == "center") c.deployment.mbs_layout = MbsLayout::center;
      else if (v == "two-symmetric") c.deployment.mbs_layout = MbsLayout::two_symmetric;
      else if (v == "four-quadrant") c.deployment.mbs_layout = MbsLayout::four_quadrant;
      else if (v == "explicit") c.deployment.mbs_layout = MbsLayout::explicit_list;
      else throw std::invalid_argument("mbs_layout must be auto|center|two-symmetric|four-quadrant|explicit");
    };
    m["deployment.mbs_positions"] = [](ScenarioConfig& c, std::string_view v) {
      c.deployment.mbs_positions = to_positions(v);
    };
    m["deployment.association_metric"] = [](ScenarioConfig& c, std::string_view v) {
      if (v == "rx_power") c.deployment.association_metric = AssociationMetric::rx_power;
      else if (v == "pathloss") c.deployment.association_metric = AssociationMetric::pathloss;
      else throw std::invalid_argument("association_metric must be rx_power|pathloss");
    };

    m["channel.carrier_frequency_hz"] = num([](ScenarioConfig& c) -> double& { return c.channel.carrier_frequency_hz; });
    m["channel.bandwidth_hz"] = num([](ScenarioConfig& c) -> double& { return c.channel.bandwidth_hz; });
    m["channel.alpha_los"] = num([](ScenarioConfig& c) -> double& { return c.channel.alpha_los; });
    m["channel.alpha_nlos"] = num([](ScenarioConfig& c) -> double& { return c.channel.alpha_nlos; });
    m["channel.sigma_los_db"] = num([](ScenarioConfig& c) -> double& { return c.channel.sigma_los_db; });
    m["channel.sigma_nlos_db"] = num([](ScenarioConfig& c) -> double& { return c.channel.sigma_nlos_db; });
    m["channel.beta"] = num([](ScenarioConfig& c) -> double& { return c.channel.beta; });
    m["channel.n_los"] = num([](ScenarioConfig& c) -> double& { return c.channel.n_los; });
    m["channel.n_nlos"] = num([](ScenarioConfig& c) -> double& { return c.channel.n_nlos; });
    m["channel.noise_psd_dbm_hz"] = num([](ScenarioConfig& c) -> double& { return c.channel.noise_psd_dbm_hz; });
    m["channel.noise_figure_db"] = num([](ScenarioConfig& c) -> double& { return c.channel.noise_figure_db; });
    m["channel.fading_convention"] = [](ScenarioConfig& c, std::string_view v) {
      if (v == "paper") c.channel.fading_convention = FadingConvention::paper;
      else if (v == "nakagami") c.channel.fading_convention = FadingConvention::nakagami;
      else throw std::invalid_argument("fading_convention must be paper|nakagami");
    };
    m["channel.capacity_model"] = [](ScenarioConfig& c, std::string_view v) {
      if (v == "conservative") c.channel.capacity_model = CapacityModel::conservative;
      else if (v == "per_activation") c.channel.capacity_model = CapacityModel::per_activation;
      else throw std::invalid_argument("capacity_model must be conservative|per_activation");
    };

    m["antenna.main_gain_tx_db"] = num([](ScenarioConfig& c) -> double& { return c.antenna.main_gain_tx_db; });
    m["antenna.side_gain_tx_db"] = num([](ScenarioConfig& c) -> double& { return c.antenna.side_gain_tx_db; });
    m["antenna.main_gain_rx_db"] = num([](ScenarioConfig& c) -> double& { return c.antenna.main_gain_rx_db; });
    m["antenna.side_gain_rx_db"] = num([](ScenarioConfig& c) -> double& { return c.antenna.side_gain_rx_db; });
    m["antenna.beamwidth_tx_deg"] = [](ScenarioConfig& c, std::string_view v) {
      c.antenna.beamwidth_tx_rad = deg_to_rad(to_double(v));
    };
    m["antenna.beamwidth_rx_deg"] = [](ScenarioConfig& c, std::string_view v) {
      c.antenna.beamwidth_rx_rad = deg_to_rad(to_double(v));
    };

    m["power.p_mbs_dbm"] = num([](ScenarioConfig& c) -> double& { return c.power.mbs_dbm; });
    m["power.p_sbs_dbm"] = num([](ScenarioConfig& c) -> double& { return c.power.sbs_dbm; });

    m["experiment.trials"] = integer([](ScenarioConfig& c) -> int& { return c.trials; });
    m["experiment.base_seed"] = [](ScenarioConfig& c, std::string_view v) {
      const long long s = to_integer(v);
      if (s < 0) throw std::invalid_argument("base_seed must be >= 0");
      c.base_seed = static_cast<std::uint64_t>(s);
    };
    m["experiment.mode"] = [](ScenarioConfig& c, std::string_view v) {
      if (v == "iab") c.mode = NetworkMode::iab;
      else if (v == "macro_only") c.mode = NetworkMode::macro_only;
      else throw std::invalid_argument("mode must be iab|macro_only");
    };
    m["experiment.fixed_deployment"] = [](ScenarioConfig& c, std::string_view v) { c.fixed_deployment = to_bool(v); };
    m["experiment.common_random_numbers"] = [](ScenarioConfig& c, std::string_view v) {
      c.common_random_numbers = to_bool(v);
    };
    m["experiment.threads"] = integer([](ScenarioConfig& c) -> int& { return c.threads; });

    m["optimizer.tolerance"] = num([](ScenarioConfig& c) -> double& { return c.tolerance; });
    m["optimizer.max_iterations"] = integer([](ScenarioConfig& c) -> int& { return c.max_iterations; });

    m["sweep.parameter"] = [](ScenarioConfig& c, std::string_view v) {
      const auto& names = sweepable_parameters();
      if (std::find(names.begin(), names.end(), v) == names.end()) {
        throw std::invalid_argument("unknown sweep parameter '" + std::string(v) + "'");
      }
      c.sweep.parameter = std::string(v);
    };
    m["sweep.values"] = [](ScenarioConfig& c, std::string_view v) { c.sweep.values = to_list(v); };
    return m;
  }();
  return table;
}

}  // namespace config_detail

/// Parses scenario text. `source` only labels error messages.
inline ScenarioConfig parse_config_text(std::string_view text, const std::string& source = "<config>") {
  using namespace config_detail;
  ScenarioConfig config;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"deployment", "channel", "antenna", "power", "experiment", "optimizer", "sweep"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw ConfigError(source, line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (const auto hash = value.find('#'); hash != std::string_view::npos) value = trim(value.substr(0, hash));
    if (section.empty()) throw ConfigError(source, line_no, "key '" + key + "' outside any section");
    const auto it = setters().find(section + "." + key);
    if (it == setters().end()) throw ConfigError(source, line_no, "unknown key '" + key + "' in [" + section + "]");
    try {
      it->second(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line_no, key + ": " + e.what());
    }
  }
  try {
    config.validate();
    if (!config.sweep.parameter.empty() && config.sweep.values.empty()) {
      throw std::invalid_argument("sweep.parameter given without sweep.values");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, 0, e.what());
  }
  return config;
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace iabsim
