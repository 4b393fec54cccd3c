#pragma once

// Stochastic mmWave link model: distance-based LOS blockage, close-in
// reference path loss with log-normal shadowing, gamma (Nakagami power)
// fading and a two-level sectored antenna pattern.

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "iabsim/units.hpp"

namespace iabsim {

enum class FadingConvention {
  paper,     // gamma(shape q, rate q) with q = 1/N: unit mean, variance N
  nakagami,  // standard Nakagami-m power: shape N, rate N, variance 1/N
};

enum class CapacityModel {
  conservative,    // every BS that could be co-scheduled interferes
  per_activation,  // only transmitters of the slot's activation interfere
};

struct ChannelParams {
  double carrier_frequency_hz = 28e9;
  double bandwidth_hz = 100e6;
  double alpha_los = 2.0;
  double alpha_nlos = 3.3;
  double sigma_los_db = 3.6;
  double sigma_nlos_db = 9.7;
  double beta = 0.01;  // blockage density, 1/m
  double n_los = 3.0;
  double n_nlos = 2.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 0.0;
  FadingConvention fading_convention = FadingConvention::paper;
  CapacityModel capacity_model = CapacityModel::conservative;

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }

  double noise_dbm() const {
    return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  }
  double noise_watts() const { return dbm_to_watts(noise_dbm()); }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("channel parameter invariant violated: ") + what);
    };
    require(carrier_frequency_hz > 0.0, "carrier_frequency_hz > 0");
    require(bandwidth_hz > 0.0, "bandwidth_hz > 0");
    require(beta >= 0.0, "beta >= 0");
    require(alpha_los >= 1.0, "alpha_los >= 1");
    require(alpha_nlos >= 1.0, "alpha_nlos >= 1");
    require(sigma_los_db >= 0.0, "sigma_los_db >= 0");
    require(sigma_nlos_db >= 0.0, "sigma_nlos_db >= 0");
    require(n_los >= 1.0, "n_los >= 1");
    require(n_nlos >= 1.0, "n_nlos >= 1");
  }
};

struct AntennaConfig {
  double main_gain_tx_db = 10.0;
  double side_gain_tx_db = -10.0;
  double main_gain_rx_db = 10.0;
  double side_gain_rx_db = -10.0;
  double beamwidth_tx_rad = deg_to_rad(30.0);
  double beamwidth_rx_rad = deg_to_rad(90.0);

  /// Gain of a desired link: both ends steer their main lobes at each other.
  double boresight_gain() const { return db_to_linear(main_gain_tx_db + main_gain_rx_db); }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("antenna invariant violated: ") + what);
    };
    require(main_gain_tx_db >= side_gain_tx_db, "main_gain_tx_db >= side_gain_tx_db");
    require(main_gain_rx_db >= side_gain_rx_db, "main_gain_rx_db >= side_gain_rx_db");
    require(beamwidth_tx_rad > 0.0 && beamwidth_tx_rad <= kTwoPi, "0 < beamwidth_tx <= 360 deg");
    require(beamwidth_rx_rad > 0.0 && beamwidth_rx_rad <= kTwoPi, "0 < beamwidth_rx <= 360 deg");
  }
};

inline double los_probability(double distance_m, double beta) {
  if (!(distance_m >= 0.0)) throw std::domain_error("los_probability: distance must be >= 0");
  if (!(beta >= 0.0)) throw std::domain_error("los_probability: beta must be >= 0");
  return std::exp(-beta * distance_m);
}

/// Close-in free-space reference path loss in dB. Valid for d >= 1 m.
inline double path_loss_db(double distance_m, bool is_los, double shadowing_db,
                           const ChannelParams& params) {
  if (!(distance_m >= 1.0)) throw std::domain_error("path_loss_db: close-in model requires d >= 1 m");
  const double alpha = is_los ? params.alpha_los : params.alpha_nlos;
  const double reference = 20.0 * std::log10(4.0 * std::numbers::pi / params.wavelength());
  return reference + 10.0 * alpha * std::log10(distance_m) + shadowing_db;
}

template <class Rng>
double sample_shadowing(bool is_los, const ChannelParams& params, Rng& rng) {
  const double sigma = is_los ? params.sigma_los_db : params.sigma_nlos_db;
  std::normal_distribution<double> standard(0.0, 1.0);
  return sigma * standard(rng);
}

/// Shape/rate of the power-fading gamma law; mean is always 1.
inline double fading_shape(bool is_los, const ChannelParams& params) {
  const double n = is_los ? params.n_los : params.n_nlos;
  return params.fading_convention == FadingConvention::paper ? 1.0 / n : n;
}

template <class Rng>
double sample_fading(bool is_los, const ChannelParams& params, Rng& rng) {
  const double q = fading_shape(is_los, params);
  std::gamma_distribution<double> gamma(q, 1.0 / q);
  double g = gamma(rng);
  // Shapes below one put real mass at tiny values; keep the gain strictly positive.
  return g > 0.0 ? g : std::numeric_limits<double>::min();
}

/// Random array gain of an interfering path. AOD and AOA are uniform on
/// (0, 2pi]; each end uses its main-lobe gain when the angle falls inside
/// the main-lobe beamwidth. Both angles are always drawn so the stream
/// consumption does not depend on the antenna configuration.
template <class Rng>
double sample_interferer_gain(const AntennaConfig& antenna, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double aod = kTwoPi * (1.0 - unit(rng));
  const double aoa = kTwoPi * (1.0 - unit(rng));
  const double tx_db = aod < antenna.beamwidth_tx_rad || antenna.beamwidth_tx_rad >= kTwoPi
                           ? antenna.main_gain_tx_db
                           : antenna.side_gain_tx_db;
  const double rx_db = aoa < antenna.beamwidth_rx_rad || antenna.beamwidth_rx_rad >= kTwoPi
                           ? antenna.main_gain_rx_db
                           : antenna.side_gain_rx_db;
  return db_to_linear(tx_db + rx_db);
}

/// Received interference contribution from one concurrently active transmitter.
struct InterferingPath {
  double tx_power_w;
  double array_gain;  // D, linear
  double fading;      // g
  double path_gain;   // l, linear
};

/// SINR of a desired link. The desired link always sees the boresight gain
/// M_t * M_r.
inline double sinr(double tx_power_w, double fading, double path_gain,
                   std::span<const InterferingPath> interferers, double noise_w,
                   const AntennaConfig& antenna) {
  double interference = 0.0;
  for (const auto& path : interferers) {
    interference += path.tx_power_w * path.array_gain * path.fading * path.path_gain;
  }
  return tx_power_w * antenna.boresight_gain() * fading * path_gain / (noise_w + interference);
}

/// Shannon capacity in bit/s.
inline double link_capacity(double sinr_linear, double bandwidth_hz) {
  if (!(sinr_linear >= 0.0)) throw std::domain_error("link_capacity: SINR must be >= 0");
  return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

}  // namespace iabsim
