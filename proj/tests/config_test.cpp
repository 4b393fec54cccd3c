#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "iabsim/config.hpp"

using namespace iabsim;

TEST(Config, EmptyGivesBaseline) {
  const auto c = parse_config_text("");
  EXPECT_EQ(c.channel.carrier_frequency_hz, 28e9);
  EXPECT_EQ(c.channel.bandwidth_hz, 100e6);
  EXPECT_EQ(c.power.sbs_dbm, 30.0);
  EXPECT_EQ(c.power.mbs_dbm, 40.0);
  EXPECT_EQ(c.channel.beta, 0.01);
  EXPECT_EQ(c.antenna.main_gain_tx_db, 10.0);
  EXPECT_EQ(c.antenna.main_gain_rx_db, 10.0);
  EXPECT_EQ(c.antenna.side_gain_tx_db, -10.0);
  EXPECT_EQ(c.antenna.side_gain_rx_db, -10.0);
  EXPECT_NEAR(rad_to_deg(c.antenna.beamwidth_tx_rad), 30.0, 1e-12);
  EXPECT_NEAR(rad_to_deg(c.antenna.beamwidth_rx_rad), 90.0, 1e-12);
  EXPECT_EQ(c.channel.n_los, 3.0);
  EXPECT_EQ(c.channel.n_nlos, 2.0);
  EXPECT_EQ(c.channel.sigma_los_db, 3.6);
  EXPECT_EQ(c.channel.sigma_nlos_db, 9.7);
  EXPECT_EQ(c.deployment.num_mbs, 1);
  EXPECT_EQ(c.deployment.num_sbs, 2);
  EXPECT_EQ(c.deployment.num_users, 10);
  EXPECT_EQ(c.deployment.degree_cap, 2);
  EXPECT_EQ(c.channel.capacity_model, CapacityModel::conservative);
  EXPECT_TRUE(c.sweep.empty());
}

TEST(Config, Override) {
  const auto c = parse_config_text("[channel]\nalpha_los = 2.5\n");
  EXPECT_EQ(c.channel.alpha_los, 2.5);
  EXPECT_EQ(c.channel.alpha_nlos, 3.3);
}

TEST(Config, NegativeBetaRejected) {
  try {
    parse_config_text("[channel]\nbeta = -1\n");
    FAIL() << "accepted beta = -1";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    parse_config_text("# comment\n[deployment]\nnum_users = 4\nbogus\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  try {
    parse_config_text("[deployment]\nnum_users = 4\nnum_sector = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("num_sector"), std::string::npos);
  }
  EXPECT_THROW(parse_config_text("num_users = 4\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[nowhere]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[deployment]\nnum_users = four\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[deployment]\nnum_users = 0\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[experiment]\ntrials = 0\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nparameter = colour\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nparameter = beta\n"), ConfigError);
}

TEST(Config, AllSections) {
  const auto c = parse_config_text(
      "[deployment]\n"
      "area_side_m = 500\nnum_mbs = 2\nnum_sbs = 4\nnum_users = 8\ndegree_cap = 3\n"
      "mbs_layout = explicit\nmbs_positions = 10,20; 30,40\nassociation_metric = pathloss\n"
      "[channel]\nfading_convention = nakagami\ncapacity_model = per_activation  # trailing comment\n"
      "noise_figure_db = 7\n"
      "[antenna]\nbeamwidth_tx_deg = 60\nmain_gain_tx_db = 15\n"
      "[power]\np_mbs_dbm = 46\np_sbs_dbm = 24\n"
      "[experiment]\ntrials = 50\nbase_seed = 9\nmode = macro_only\nfixed_deployment = true\n"
      "common_random_numbers = yes\nthreads = 2\n"
      "[optimizer]\ntolerance = 1e-8\nmax_iterations = 40\n"
      "[sweep]\nparameter = num_sbs\nvalues = 2, 4, 8\n");
  EXPECT_EQ(c.deployment.area_side_m, 500);
  EXPECT_EQ(c.deployment.num_mbs, 2);
  EXPECT_EQ(c.deployment.degree_cap, 3);
  EXPECT_EQ(c.deployment.mbs_layout, MbsLayout::explicit_list);
  ASSERT_EQ(c.deployment.mbs_positions.size(), 2u);
  EXPECT_EQ(c.deployment.mbs_positions[1].y, 40);
  EXPECT_EQ(c.deployment.association_metric, AssociationMetric::pathloss);
  EXPECT_EQ(c.channel.fading_convention, FadingConvention::nakagami);
  EXPECT_EQ(c.channel.capacity_model, CapacityModel::per_activation);
  EXPECT_EQ(c.channel.noise_figure_db, 7);
  EXPECT_NEAR(c.antenna.beamwidth_tx_rad, std::acos(-1.0) / 3.0, 1e-15);
  EXPECT_EQ(c.power.mbs_dbm, 46);
  EXPECT_EQ(c.trials, 50);
  EXPECT_EQ(c.base_seed, 9u);
  EXPECT_EQ(c.mode, NetworkMode::macro_only);
  EXPECT_TRUE(c.fixed_deployment);
  EXPECT_TRUE(c.common_random_numbers);
  EXPECT_EQ(c.threads, 2);
  EXPECT_EQ(c.tolerance, 1e-8);
  EXPECT_EQ(c.max_iterations, 40);
  EXPECT_EQ(c.sweep.parameter, "num_sbs");
  EXPECT_EQ(c.sweep.values, (std::vector<double>{2, 4, 8}));
}

TEST(Config, ExplicitLayoutCountMismatch) {
  EXPECT_THROW(parse_config_text("[deployment]\nnum_mbs = 2\nmbs_layout = explicit\nmbs_positions = 1,1\n"),
               ConfigError);
}

TEST(Config, MissingFile) { EXPECT_THROW(parse_config("/nonexistent/x.ini"), ConfigError); }

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"baseline.ini", "p_mbs_sweep.ini", "sbs_sweep.ini", "mbs_sweep.ini", "blockage_sweep.ini",
                           "per_activation.ini"}) {
    const std::string path = std::string(IABSIM_CONFIG_DIR) + "/" + name;
    EXPECT_NO_THROW(parse_config(path)) << path;
  }
}
