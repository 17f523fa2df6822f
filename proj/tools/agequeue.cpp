// Command-line front end: simulate, meanfield, moments, verify, phase-check.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agequeue/des.hpp"
#include "agequeue/io.hpp"
#include "agequeue/meanfield.hpp"
#include "agequeue/moments.hpp"
#include "agequeue/phase.hpp"
#include "agequeue/verify.hpp"

namespace fs = std::filesystem;
using namespace agequeue;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAcceptance = 2;

struct CommonOptions {
  std::string scenario;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<double> h;
  std::optional<double> t_max;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed (overrides the scenario)");
  cmd->add_option("--replications", o.replications, "Replication count (overrides the scenario)");
  cmd->add_option("--h", o.h, "Grid step (overrides the scenario)");
  cmd->add_option("--t-max", o.t_max, "Horizon (overrides the scenario)");
}

Scenario prepare(const CommonOptions& o) {
  ScenarioConfig cfg = load_scenario_config(o.scenario);
  if (o.seed) cfg.seed = *o.seed;
  if (o.replications) cfg.replications = *o.replications;
  if (o.h) cfg.h = *o.h;
  if (o.t_max) cfg.t_max = *o.t_max;
  return validate_scenario(cfg);
}

std::string sex_name(Sex s) { return s == Sex::female ? "female" : "male"; }

int cmd_simulate(const CommonOptions& o, std::vector<double> observe) {
  const Scenario s = prepare(o);
  const auto& cfg = s.config();
  if (observe.empty()) observe = cfg.observation.times;
  if (observe.empty()) observe.push_back(cfg.t_max);
  const auto edges = observation_edges(cfg.observation);
  const Ensemble ens = run_ensemble(s, observe, edges, cfg.replications, cfg.seed);

  CsvTable t;
  t.header = {"replication", "time", "bin_lo", "bin_hi", "sex", "count"};
  for (std::size_t i = 0; i < ens.size(); ++i) {
    for (const auto& obs : ens[i]) {
      for (Sex sex : {Sex::female, Sex::male}) {
        const auto& counts = sex == Sex::female ? obs.female : obs.male;
        for (std::size_t b = 0; b < counts.size(); ++b) {
          t.rows.push_back({static_cast<std::int64_t>(i), obs.time, obs.edges[b], obs.edges[b + 1], sex_name(sex),
                            counts[b]});
        }
      }
    }
  }
  emit_csv({{"simulate.csv", t}}, o.out);
  return kExitOk;
}

int cmd_meanfield(const CommonOptions& o) {
  const Scenario s = prepare(o);
  const MeanField mf = solve_meanfield(s);
  const auto& grid = mf.density.grid;
  CsvTable dens;
  dens.header = {"time", "age", "g", "m"};
  for (int k = 0; k < grid.times(); ++k) {
    for (int j = 0; j < grid.ages(); ++j) {
      dens.rows.push_back({grid.time(k), grid.age(j), mf.density.g.at(k, j), mf.density.m.at(k, j)});
    }
  }
  CsvTable flow;
  flow.header = {"time", "phi", "varphi_male"};
  for (int k = 0; k < grid.times(); ++k) flow.rows.push_back({grid.time(k), mf.flow.female[k], mf.flow.male[k]});
  emit_csv({{"density.csv", dens}, {"birth_flow.csv", flow}}, o.out);
  return kExitOk;
}

int cmd_moments(const CommonOptions& o, bool as_printed) {
  const Scenario s = prepare(o);
  const MeanField mf = solve_meanfield(s);
  MomentOptions opt;
  if (as_printed) opt.reading = MomentReading::as_printed;
  const MomentField f = solve_moments(s, mf.density, opt);
  const auto& grid = f.grid;

  CsvTable age;
  age.header = {"time", "age", "sigma1_sq", "sigma2_sq", "r1", "r12"};
  for (int k = 0; k < grid.times(); ++k) {
    for (int j = 0; j < grid.ages(); ++j) {
      age.rows.push_back({grid.time(k), grid.age(j), f.sigma1_sq_age.at(k, j), f.sigma2_sq_age.at(k, j),
                          f.r1.at(k, j), f.r12.at(k, j)});
    }
  }
  CsvTable zero;
  zero.header = {"time", "sigma1_sq_zero", "sigma2_sq_zero", "sigma12_sq_zero"};
  for (int k = 0; k < grid.times(); ++k) {
    zero.rows.push_back({grid.time(k), f.sigma1_sq[k], f.sigma2_sq[k], f.sigma12_sq[k]});
  }
  CsvTable res;
  res.header = {"equation", "max_residual", "nodes"};
  for (const auto& e : check_system24(f, s, mf.density)) {
    res.rows.push_back({e.name, e.max_norm, static_cast<std::int64_t>(e.nodes)});
  }
  emit_csv({{"moments_age.csv", age}, {"moments_zero.csv", zero}, {"moments_residuals.csv", res}}, o.out);
  return kExitOk;
}

int cmd_verify(const CommonOptions& o) {
  const Scenario s = prepare(o);
  const VerifyOutcome v = run_verify(s, o.out);
  const auto& th = s.config().thresholds;
  std::printf("mean      pass fraction %.4f (floor %.2f)\n", v.mean_pass, th.mean_floor);
  std::printf("variance  pass fraction %.4f (floor %.2f)\n", v.variance_pass, th.variance_floor);
  if (v.normality_run) {
    std::printf("normality pass fraction %.4f (floor %.2f)\n", v.normality_pass, th.normality_floor);
  } else {
    std::printf("normality skipped: fewer than %d replications\n", kMinNormalityReplications);
  }
  std::printf("%s\n", v.passed ? "PASS" : "FAIL");
  return v.passed ? kExitOk : kExitAcceptance;
}

int cmd_phase_check(const CommonOptions& o, std::vector<double> mus, int points, const std::string& sex) {
  const Scenario s = prepare(o);
  const SurvivalModel& surv = s.survival(sex == "male" ? Sex::male : Sex::female);
  const auto xs = phase_check_ages(surv, points);
  CsvTable cdf;
  cdf.header = {"mu", "x", "ph_cdf", "target_cdf", "abs_err"};
  CsvTable ks;
  ks.header = {"mu", "ks"};
  for (double mu : mus) {
    const auto ph = ph_service_cdf_grid(surv, mu, xs);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double target = 1.0 - surv.survival(xs[i]);
      const double err = std::abs(ph[i] - target);
      worst = std::max(worst, err);
      cdf.rows.push_back({mu, xs[i], ph[i], target, err});
    }
    ks.rows.push_back({mu, worst});
    std::printf("mu=%g KS=%.6g\n", mu, worst);
  }
  emit_csv({{"phase_check.csv", cdf}, {"phase_ks.csv", ks}}, o.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sex autonomous infinite-server queue: simulation and asymptotics"};
  // -h is taken by the grid step, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  CommonOptions sim_o, mf_o, mom_o, ver_o, ph_o;
  std::vector<double> observe;
  bool as_printed = false;
  std::vector<double> mus{1.0, 10.0, 100.0};
  int points = 400;
  std::string sex = "female";

  auto* sim = app.add_subcommand("simulate", "Discrete-event ensemble, binned counts");
  add_common(sim, sim_o);
  sim->add_option("--observe", observe, "Observation times (default: scenario plan)")->delimiter(',');

  auto* mf = app.add_subcommand("meanfield", "Birth flows and mean densities");
  add_common(mf, mf_o);

  auto* mom = app.add_subcommand("moments", "Second-order moment fields and their transport residuals");
  add_common(mom, mom_o);
  mom->add_flag("--as-printed", as_printed, "Freeze the integrand at the observation time");

  auto* ver = app.add_subcommand("verify", "Monte Carlo comparison against the asymptotics");
  add_common(ver, ver_o);

  auto* ph = app.add_subcommand("phase-check", "Phase-type approximation of the lifetime law");
  add_common(ph, ph_o);
  ph->add_option("--mu", mus, "Phase rates")->delimiter(',')->capture_default_str();
  ph->add_option("--points", points, "Evaluation ages")->capture_default_str();
  ph->add_option("--sex", sex, "female or male")->check(CLI::IsMember({"female", "male"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*sim) return cmd_simulate(sim_o, observe);
    if (*mf) return cmd_meanfield(mf_o);
    if (*mom) return cmd_moments(mom_o, as_printed);
    if (*ver) return cmd_verify(ver_o);
    if (*ph) return cmd_phase_check(ph_o, mus, points, sex);
  } catch (const ScenarioError& e) {
    std::cerr << "invalid scenario:\n";
    for (const auto& m : e.errors()) std::cerr << "  " << m << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
