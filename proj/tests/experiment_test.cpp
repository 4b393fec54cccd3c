#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "iabsim/experiment.hpp"

using namespace iabsim;

namespace {

ScenarioConfig small_config(int trials) {
  ScenarioConfig c;
  c.trials = trials;
  c.base_seed = 11;
  return c;
}

}  // namespace

TEST(Seeds, DistinctStreams) {
  EXPECT_NE(derive_seed(1, 0, 0, 0), derive_seed(1, 0, 0, 1));
  EXPECT_NE(derive_seed(1, 0, 1, 0), derive_seed(1, 1, 0, 0));
  EXPECT_NE(derive_seed(1, 0, 0, 0), derive_seed(2, 0, 0, 0));
  EXPECT_EQ(derive_seed(5, 3, 7, 1), derive_seed(5, 3, 7, 1));
}

TEST(Trial, Deterministic) {
  const auto c = small_config(1);
  const auto a = run_trial(c, 2, 17);
  const auto b = run_trial(c, 2, 17);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.mbs_associations, b.mbs_associations);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_NE(a.theta, run_trial(c, 2, 18).theta);
}

TEST(Trial, DefaultScenarioPositive) {
  const auto c = small_config(1);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto r = run_trial(c, 0, i);
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.theta, 0.0);
    EXPECT_EQ(r.users, 10);
  }
}

TEST(Trial, MacroOnlyIsTdma) {
  auto c = small_config(1);
  c.mode = NetworkMode::macro_only;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto d = run_trial_detail(c, 0, i);
    EXPECT_EQ(d.topology.num_sbs(), 0);
    double inv = 0.0;
    for (double cap : d.channel.capacity_bps) inv += 1.0 / cap;
    EXPECT_NEAR(d.result.theta, 1.0 / inv, 1e-12 * d.result.theta);
    for (const auto& s : d.result.schedule.slots) EXPECT_EQ(s.activation.size(), 1u);
  }
}

TEST(Trial, FixedDeploymentKeepsPositions) {
  auto c = small_config(1);
  c.fixed_deployment = true;
  const auto a = run_trial_detail(c, 0, 1);
  const auto b = run_trial_detail(c, 0, 2);
  for (std::size_t i = 0; i < a.topology.nodes.size(); ++i) {
    EXPECT_EQ(a.topology.nodes[i].position.x, b.topology.nodes[i].position.x);
  }
  EXPECT_NE(a.channel.capacity_bps, b.channel.capacity_bps);
}

TEST(Trial, PerActivationNotBelowConservative) {
  auto c = small_config(1);
  auto p = c;
  p.channel.capacity_model = CapacityModel::per_activation;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto a = run_trial_detail(c, 0, i);
    const auto b = run_trial_detail(p, 0, i);
    EXPECT_GE(b.result.theta, a.result.theta * (1.0 - 1e-9));
    const auto v = verify_schedule(b.result.schedule, b.topology, b.channel.capacity_bps, b.weights,
                                   [&](std::span<const LinkId> act) {
                                     return activation_capacities(b.topology, b.channel, act);
                                   });
    EXPECT_TRUE(v.feasible);
    EXPECT_NEAR(v.theta_achieved, b.result.theta, 1e-6 * b.result.theta);
  }
}

TEST(Parameters, ApplyAndReject) {
  ScenarioConfig c;
  apply_parameter(c, "p_mbs_dbm", 50);
  EXPECT_EQ(c.power.mbs_dbm, 50);
  apply_parameter(c, "beamwidth_tx_deg", 60);
  EXPECT_NEAR(c.antenna.beamwidth_tx_rad, std::acos(-1.0) / 3.0, 1e-15);
  apply_parameter(c, "num_sbs", 4);
  EXPECT_EQ(c.deployment.num_sbs, 4);
  EXPECT_THROW(apply_parameter(c, "num_sbs", 2.5), std::invalid_argument);
  EXPECT_THROW(apply_parameter(c, "no_such", 1), std::invalid_argument);
  for (const auto& name : sweepable_parameters()) {
    ScenarioConfig d;
    EXPECT_NO_THROW(apply_parameter(d, name, 2.0)) << name;
  }
}

TEST(Sweep, RequiresParameter) {
  auto c = small_config(2);
  EXPECT_THROW(sweep(c), std::invalid_argument);
  c.sweep = {"p_mbs_dbm", {}};
  EXPECT_THROW(sweep(c), std::invalid_argument);
}

TEST(Sweep, SingleTrialStderrNa) {
  auto c = small_config(1);
  c.sweep = {"p_mbs_dbm", {40}};
  const auto pts = sweep(c);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_TRUE(std::isnan(pts[0].stderr_theta_bps));
  std::ostringstream os;
  write_csv(os, pts);
  EXPECT_NE(os.str().find(",NA,"), std::string::npos);
}

TEST(Sweep, ThreadsDoNotChangeResults) {
  auto c = small_config(40);
  c.sweep = {"p_mbs_dbm", {30, 50}};
  const auto serial = sweep(c);
  c.threads = 3;
  const auto parallel = sweep(c);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].mean_theta_bps, parallel[i].mean_theta_bps);
    EXPECT_EQ(serial[i].stderr_theta_bps, parallel[i].stderr_theta_bps);
  }
}

TEST(Sweep, AssociationProbabilityInRange) {
  auto c = small_config(100);
  c.sweep = {"p_mbs_dbm", {30, 60}};
  const auto pts = sweep(c);
  for (const auto& p : pts) {
    EXPECT_GE(p.mbs_assoc_prob, 0.0);
    EXPECT_LE(p.mbs_assoc_prob, 1.0);
    EXPECT_GE(p.stderr_theta_bps, 0.0);
    EXPECT_EQ(p.trials_ok + p.trials_failed, 100);
  }
  EXPECT_GT(pts[1].mbs_assoc_prob, pts[0].mbs_assoc_prob);
}

TEST(Aggregate, ExcludesFailedTrials) {
  std::vector<TrialResult> t(3);
  t[0] = {2.0, 1, 2, 1, true, ""};
  t[1] = {4.0, 2, 2, 1, true, ""};
  t[2] = {100.0, 0, 2, 1, false, "x"};
  const auto p = aggregate(7.0, t);
  EXPECT_EQ(p.trials_ok, 2);
  EXPECT_EQ(p.trials_failed, 1);
  EXPECT_DOUBLE_EQ(p.mean_theta_bps, 3.0);
  EXPECT_DOUBLE_EQ(p.stderr_theta_bps, 1.0);
  EXPECT_DOUBLE_EQ(p.mbs_assoc_prob, 0.75);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Compare, SameValuesBothModes) {
  auto c = small_config(20);
  const auto r = compare_iab_macro(c, {30, 60});
  ASSERT_EQ(r.iab.size(), 2u);
  ASSERT_EQ(r.macro_only.size(), 2u);
  EXPECT_DOUBLE_EQ(r.macro_only[0].mbs_assoc_prob, 1.0);
}

TEST(Antenna, BeamwidthIrrelevantWithoutInterference) {
  auto c = small_config(5);
  c.deployment.num_sbs = 0;
  c.deployment.num_users = 1;
  const auto pts = antenna_sweep(c, {10}, {30, 60});
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].stats.mean_theta_bps, pts[1].stats.mean_theta_bps);
}

TEST(Csv, Format) {
  SweepPoint p;
  p.value = 40;
  p.mean_theta_bps = 1.5e7;
  p.stderr_theta_bps = 2.0e5;
  p.mbs_assoc_prob = 0.5;
  p.trials_ok = 10;
  std::ostringstream os;
  write_csv(os, {p});
  EXPECT_EQ(os.str(),
            "sweep_value,mean_theta_bps,stderr_theta_bps,mbs_assoc_prob,trials_ok,trials_failed\n"
            "4.0000000000000000e+01,1.5000000000000000e+07,2.0000000000000000e+05,5.0000000000000000e-01,10,0\n");
}
