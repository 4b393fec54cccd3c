// iabsim command-line front end.
//
//   iabsim_cli single        one trial: theta and the optimal schedule
//   iabsim_cli sweep         CSV over the configured sweep
//   iabsim_cli compare       IAB vs macro-only CSV plus the crossover line
//   iabsim_cli antenna       CSV over transmit main-lobe gain x beamwidth
//   iabsim_cli oracle-check  randomized equivalence against the reference oracle
//   iabsim_cli verify        re-check a serialized schedule

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iabsim/iabsim.hpp"

namespace {

using namespace iabsim;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::optional<int> threads;
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig config = c.config_path.empty() ? ScenarioConfig{} : parse_config(c.config_path);
  if (c.seed) config.base_seed = *c.seed;
  if (c.threads) config.threads = *c.threads;
  config.validate();
  return config;
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty() || c.out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + c.out_path);
  out << text;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_single(const Common& c, std::uint64_t trial, const std::string& dump_dir) {
  const ScenarioConfig config = load(c);
  const TrialDetail d = run_trial_detail(config, 0, trial);
  const Topology& t = d.topology;
  std::ostringstream os;
  os << "theta_bps " << format_number(d.result.theta) << '\n'
     << "iterations " << d.result.iterations << '\n'
     << "converged " << (d.result.converged ? 1 : 0) << '\n'
     << "nodes MBS " << t.num_mbs() << " SBS " << t.num_sbs() << " USER " << t.num_users() << '\n';
  int assoc = 0;
  for (const Node& n : t.nodes) {
    if (n.kind == NodeKind::user && t.is_mbs(t.parent[static_cast<std::size_t>(n.id)])) ++assoc;
  }
  os << "mbs_associations " << assoc << '\n';
  for (std::size_t l = 0; l < t.links.size(); ++l) {
    os << "link " << l << ' ' << t.links[l].from << "->" << t.links[l].to << " capacity_bps "
       << format_number(d.channel.capacity_bps[l]) << '\n';
  }
  for (const Slot& s : d.result.schedule.slots) {
    os << "slot " << format_number(s.duration);
    for (LinkId l : s.activation) os << ' ' << t.links[l].from << "->" << t.links[l].to;
    os << '\n';
  }
  emit(c, os.str());

  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    std::ostringstream topo, caps, sched;
    write_topology(topo, t);
    write_capacities(caps, t, d.channel.capacity_bps);
    write_schedule(sched, d.result.schedule,
                   ScheduleSummary{d.result.theta, d.result.iterations, d.result.converged});
    const std::filesystem::path dir(dump_dir);
    write_text(dir / "topology.txt", topo.str());
    write_text(dir / "capacities.txt", caps.str());
    write_text(dir / "schedule.txt", sched.str());
  }
  return d.result.converged ? 0 : 3;
}

int run_sweep(const Common& c) {
  const ScenarioConfig config = load(c);
  if (config.sweep.empty()) throw std::runtime_error("sweep: the config has no [sweep] parameter/values");
  std::ostringstream os;
  write_csv(os, sweep(config));
  emit(c, os.str());
  return 0;
}

int run_compare(const Common& c, const std::vector<double>& p_mbs) {
  const ScenarioConfig config = load(c);
  if (p_mbs.empty()) throw std::runtime_error("compare: --p-mbs needs at least one value");
  const CompareReport r = compare_iab_macro(config, p_mbs);
  std::ostringstream os;
  write_csv_header(os, true);
  for (const auto& p : r.iab) write_csv_row(os, p, "iab");
  for (const auto& p : r.macro_only) write_csv_row(os, p, "macro_only");
  os << "# crossover_p_mbs_dbm " << (r.crossover_p_mbs_dbm ? format_number(*r.crossover_p_mbs_dbm) : "NA") << '\n';
  emit(c, os.str());
  return 0;
}

int run_antenna(const Common& c, const std::vector<double>& gains, const std::vector<double>& beamwidths) {
  const ScenarioConfig config = load(c);
  std::ostringstream os;
  os << "main_gain_tx_db,beamwidth_tx_deg,mean_theta_bps,stderr_theta_bps,mbs_assoc_prob,trials_ok,trials_failed\n";
  for (const auto& p : antenna_sweep(config, gains, beamwidths)) {
    os << format_number(p.main_gain_tx_db) << ',' << format_number(p.beamwidth_tx_deg) << ','
       << format_number(p.stats.mean_theta_bps) << ',' << format_number(p.stats.stderr_theta_bps) << ','
       << format_number(p.stats.mbs_assoc_prob) << ',' << p.stats.trials_ok << ',' << p.stats.trials_failed << '\n';
  }
  emit(c, os.str());
  return 0;
}

int run_oracle(const Common& c, int instances, int max_links) {
  const std::uint64_t seed = c.seed.value_or(1);
  const oracle::CheckReport r = oracle::run_oracle_check(instances, max_links, seed);
  std::ostringstream os;
  os << "instances " << r.instances << '\n'
     << "lp_mismatches " << r.lp_mismatches << '\n'
     << "certificate_failures " << r.certificate_failures << '\n'
     << "not_converged " << r.not_converged << '\n'
     << "matching_mismatches " << r.matching_mismatches << " of " << r.matching_checks << '\n'
     << "worst_relative_gap " << format_number(r.worst_relative_gap) << '\n'
     << (r.passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& f : r.failures) os << f << '\n';
  emit(c, os.str());
  if (!r.passed()) std::cerr << "oracle-check: " << r.failures.size() << " failing instance(s)\n";
  return r.passed() ? 0 : 1;
}

int run_verify(const Common& c, const std::string& topo_path, const std::string& caps_path,
               const std::string& sched_path) {
  const Topology t = read_file<Topology>(topo_path, [](std::istream& in) { return read_topology(in); });
  const auto caps =
      read_file<std::vector<double>>(caps_path, [&](std::istream& in) { return read_capacities(in, t); });
  const ScheduleFile sf = read_file<ScheduleFile>(sched_path, [](std::istream& in) { return read_schedule(in); });
  const VerifyReport v = verify_schedule(sf.schedule, t, caps, user_weights(t));

  bool ok = v.feasible;
  std::ostringstream os;
  os << "theta_achieved_bps " << format_number(v.theta_achieved) << '\n'
     << "feasible " << (v.feasible ? 1 : 0) << '\n';
  if (sf.summary) {
    const double claimed = sf.summary->theta_bps;
    const bool matches = v.theta_achieved >= claimed - 1e-9 * std::max(1.0, std::abs(claimed));
    os << "theta_claimed_bps " << format_number(claimed) << '\n' << "claim_met " << (matches ? 1 : 0) << '\n';
    ok = ok && matches;
  }
  if (!v.diagnostic.empty()) os << "diagnostic " << v.diagnostic << '\n';
  emit(c, os.str());
  if (!ok) std::cerr << "verify: schedule rejected" << (v.diagnostic.empty() ? "" : ": " + v.diagnostic) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave IAB max-min throughput simulator"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "scenario file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "base seed override");
    sub->add_option("--out", common.out_path, "output file (default stdout)");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* single = app.add_subcommand("single", "run one trial and print the schedule");
  add_common(single);
  std::uint64_t trial = 0;
  std::string dump_dir;
  single->add_option("--trial", trial, "trial index");
  single->add_option("--dump", dump_dir, "directory for topology/capacities/schedule files");

  auto* sweep_cmd = app.add_subcommand("sweep", "CSV over the configured sweep");
  add_common(sweep_cmd);

  auto* compare = app.add_subcommand("compare", "IAB vs macro-only over MBS power");
  add_common(compare);
  std::vector<double> p_mbs = {30, 35, 40, 45, 50, 55, 60};
  compare->add_option("--p-mbs", p_mbs, "MBS powers in dBm")->delimiter(',');

  auto* antenna = app.add_subcommand("antenna", "main-lobe gain x beamwidth sweep");
  add_common(antenna);
  std::vector<double> gains = {5, 10, 15, 20};
  std::vector<double> beamwidths = {30, 60};
  antenna->add_option("--gains", gains, "transmit main-lobe gains in dB")->delimiter(',');
  antenna->add_option("--beamwidths", beamwidths, "transmit beamwidths in degrees")->delimiter(',');

  auto* oracle_cmd = app.add_subcommand("oracle-check", "randomized comparison with the reference oracle");
  add_common(oracle_cmd);
  int instances = 100;
  int max_links = 8;
  oracle_cmd->add_option("--instances", instances, "number of random instances")->check(CLI::NonNegativeNumber);
  oracle_cmd->add_option("--max-links", max_links, "largest instance")->check(CLI::Range(1, 20));

  auto* verify = app.add_subcommand("verify", "re-check a serialized schedule");
  add_common(verify);
  std::string topo_path, caps_path, sched_path;
  verify->add_option("--topology", topo_path)->required()->check(CLI::ExistingFile);
  verify->add_option("--capacities", caps_path)->required()->check(CLI::ExistingFile);
  verify->add_option("--schedule", sched_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*single) return run_single(common, trial, dump_dir);
    if (*sweep_cmd) return run_sweep(common);
    if (*compare) return run_compare(common, p_mbs);
    if (*antenna) return run_antenna(common, gains, beamwidths);
    if (*oracle_cmd) return run_oracle(common, instances, max_links);
    if (*verify) return run_verify(common, topo_path, caps_path, sched_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
