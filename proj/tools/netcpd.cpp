// Command-line front end: simulate, detect, np-detect, calibrate, experiment.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "netcpd/calibration.hpp"
#include "netcpd/config_io.hpp"
#include "netcpd/detector.hpp"
#include "netcpd/generators.hpp"
#include "netcpd/harness.hpp"
#include "netcpd/np_detector.hpp"
#include "netcpd/snapshot_io.hpp"

using namespace netcpd;

namespace {

struct ScenarioArgs {
  std::string scenario = "1";
  int n = 100;
  std::string delta = "150";  // "none" for a change-free stream
  int horizon = 300;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--scenario", scenario, "Scenario 1-4 (sbm3, sbm5, dcbm, rdpg)");
    app->add_option("--n", n, "Number of nodes");
    app->add_option("--delta", delta, "Raw change index, or 'none'");
    app->add_option("--horizon", horizon, "Raw stream length T");
    app->add_option("--seed", seed, "Base seed");
  }

  ScenarioSpec spec() const {
    ScenarioSpec s;
    s.kind = parse_scenario_kind(scenario);
    s.n = n;
    s.delta = delta == "none" ? std::nullopt : std::optional<int>(std::stoi(delta));
    s.horizon = horizon;
    s.seed = seed;
    return s;
  }
};

// Detector options; explicit flags override values loaded with --config.
struct DetectorArgs {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<double> alpha;
  std::optional<int> gamma;
  std::optional<double> c1;
  std::optional<double> c_gate;
  std::optional<std::string> rho_hat;
  std::optional<std::string> tau_rule;
  bool absolute = false;
  int train_len = 50;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "Detector config JSON (e.g. from calibrate)");
    app->add_option("--mode", mode, "alpha | arl");
    app->add_option("--alpha", alpha, "Type-I error level");
    app->add_option("--gamma", gamma, "Target average run length");
    app->add_option("--c1", c1, "Score threshold constant");
    app->add_option("--c-gate", c_gate, "Frobenius gate constant");
    app->add_option("--rho-hat", rho_hat, "Sparsity level, or 'auto'");
    app->add_option("--tau-rule", tau_rule, "practical | theoretical");
    app->add_flag("--abs", absolute, "Use the absolute inner product");
    app->add_option("--train-len", train_len, "Snapshots used by --rho-hat auto");
  }

  DetectorConfig base() const {
    DetectorConfig cfg;
    if (!config_path.empty()) cfg = detector_config_from_json(read_json_file(config_path));
    if (mode) cfg.mode = parse_control_mode(*mode);
    if (alpha) cfg.alpha = *alpha;
    if (gamma) cfg.gamma = *gamma;
    if (c1) cfg.c1 = *c1;
    if (c_gate) cfg.c_gate = *c_gate;
    if (tau_rule) cfg.tau_rule = parse_tau_rule(*tau_rule);
    if (absolute) cfg.use_absolute_inner_product = true;
    if (rho_hat && *rho_hat != "auto") cfg.rho_hat = std::stod(*rho_hat);
    return cfg;
  }

  bool rho_auto() const { return rho_hat && *rho_hat == "auto"; }
};

SnapshotFormat parse_format(const std::string& s) {
  if (s == "dense") return SnapshotFormat::dense;
  if (s == "edges") return SnapshotFormat::edge_list;
  throw std::invalid_argument("unknown format '" + s + "' (dense or edges)");
}

nlohmann::ordered_json outcome_json(const DetectionOutcome& o) {
  nlohmann::ordered_json j;
  j["fired"] = o.fired;
  auto opt = [](std::optional<int> v) { return v ? nlohmann::ordered_json(*v) : nullptr; };
  j["t_raw"] = opt(o.absolute_raw());
  j["t_split"] = opt(o.t_split);
  j["s_hit"] = opt(o.s_hit);
  j["gate_value"] = o.gate_value;
  j["score"] = o.score;
  j["threshold"] = o.threshold_used;
  return j;
}

struct DetectCommand {
  std::string input;
  std::string format = "dense";
  std::optional<int> horizon;
  bool restart = false;
  DetectorArgs det;
  int r0 = 2;
  std::string strategy = "exhaustive";

  void add(CLI::App* app, bool np) {
    app->add_option("--input", input, "Snapshot file")->required();
    app->add_option("--format", format, "dense | edges");
    app->add_option("--horizon", horizon, "Stop after this many raw snapshots");
    app->add_flag("--restart", restart, "Restart after each detection");
    det.add(app);
    if (np) {
      app->add_option("--r0", r0, "Number of blocks");
      app->add_option("--strategy", strategy, "exhaustive | alt:R,I");
    }
  }

  int run(bool np) const {
    auto snaps = read_snapshot_file(input, parse_format(format));
    if (snaps.empty()) throw std::runtime_error(input + ": no snapshots");
    DetectorConfig cfg = det.base();
    if (det.rho_auto()) {
      const auto len = std::min<std::size_t>(snaps.size(), static_cast<std::size_t>(det.train_len));
      cfg.rho_hat = estimate_rho(std::span<const AdjacencySnapshot>(snaps.data(), len));
    }
    if (horizon) cfg.max_time = *horizon;
    cfg.validate();
    const Denoiser denoiser =
        np ? np_denoiser(r0, NpStrategy::parse(strategy)) : usvt_denoiser();
    VectorSource source(std::move(snaps));
    int count = 0;
    if (restart) {
      for (const auto& o : run_multi(source, cfg, denoiser)) {
        std::cout << outcome_json(o).dump() << '\n';
        ++count;
      }
    } else {
      const auto o = netcpd::run(source, cfg, denoiser);
      std::cout << outcome_json(o).dump() << '\n';
      count = o.fired ? 1 : 0;
    }
    std::cerr << count << " detection(s), rho_hat " << cfg.rho_hat << '\n';
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online change-point detection for network streams"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample a scenario stream to a snapshot file");
  ScenarioArgs sim_args;
  sim_args.add(sim);
  std::string sim_out;
  sim->add_option("--out", sim_out, "Snapshot file; ground truth goes to <out>.truth.json")
      ->required();

  // detect / np-detect
  auto* det = app.add_subcommand("detect", "Run the USVT detector on a snapshot file");
  DetectCommand det_cmd;
  det_cmd.add(det, false);
  auto* npdet = app.add_subcommand("np-detect", "Run the block-model detector on a snapshot file");
  DetectCommand np_cmd;
  np_cmd.add(npdet, true);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Calibrate c1 on null streams, write a config");
  ScenarioArgs cal_scn;
  cal_scn.add(cal);
  std::string training_file;
  std::string training_format = "dense";
  DetectorArgs cal_det;
  cal_det.add(cal);
  std::string regime = "pfa";
  CalibrationTarget target;
  std::string cal_out;
  cal->add_option("--training-file", training_file, "Null training snapshots (replaces --scenario)");
  cal->add_option("--training-format", training_format, "dense | edges");
  cal->add_option("--regime", regime, "pfa | arl");
  cal->add_option("--t-train", target.t_train, "Training horizon (raw) for the pfa regime");
  cal->add_option("--reps", target.reps, "Null replicates");
  cal->add_option("--c1-low", target.c1_low, "Lower end of the search bracket");
  cal->add_option("--c1-high", target.c1_high, "Upper end of the search bracket");
  cal->add_option("--max-steps", target.max_steps, "Bisection steps");
  cal->add_option("--threads", target.threads, "Worker threads (0 = all cores)");
  cal->add_option("--out", cal_out, "Config JSON to write")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo delay / false-alarm experiment");
  ScenarioArgs exp_scn;
  exp_scn.add(exp);
  DetectorArgs exp_det;
  exp_det.add(exp);
  std::string detector_kind = "usvt";
  int exp_r0 = 2;
  std::string exp_strategy = "exhaustive";
  int reps = 50;
  int threads = 0;
  std::string out_dir;
  exp->add_option("--detector", detector_kind, "usvt | np");
  exp->add_option("--r0", exp_r0, "Number of blocks for the np detector");
  exp->add_option("--strategy", exp_strategy, "exhaustive | alt:R,I");
  exp->add_option("--reps", reps, "Replicates");
  exp->add_option("--threads", threads, "Worker threads (0 = all cores)");
  exp->add_option("--out-dir", out_dir, "Directory for results.csv, aggregate.json, config.json")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const ScenarioSpec spec = sim_args.spec();
      auto [sampler, truth] = sample_stream(spec);
      write_snapshot_file(sim_out, collect(sampler));
      nlohmann::ordered_json j;
      j["scenario"] = to_json(spec);
      j["truth"] = to_json(truth);
      write_json_file(sim_out + ".truth.json", j);
      return 0;
    }
    if (*det) return det_cmd.run(false);
    if (*npdet) return np_cmd.run(true);

    if (*cal) {
      target.regime = parse_regime(regime);
      DetectorConfig cfg = cal_det.base();
      target.seed = cal_scn.seed;
      if (target.regime == CalibrationRegime::pfa) {
        cfg.mode = ControlMode::alpha;
        target.alpha = cfg.alpha;
      } else {
        cfg.mode = ControlMode::arl;
        target.gamma = cfg.gamma;
      }
      std::optional<Scenario> null_law;
      if (!training_file.empty()) {
        const auto training = read_snapshot_file(training_file, parse_format(training_format));
        null_law.emplace(empirical_null(training, target.t_train));
        if (!cal_det.rho_hat || cal_det.rho_auto()) cfg.rho_hat = estimate_rho(training);
      } else {
        ScenarioSpec spec = cal_scn.spec();
        spec.delta = std::nullopt;
        null_law.emplace(Scenario(spec).null_law(spec.horizon));
        if (!cal_det.rho_hat || cal_det.rho_auto()) {
          cfg.rho_hat = training_rho(*null_law, target.t_train, derive_seed(spec.seed, 2));
        }
      }
      const CalibrationResult res = calibrate_c1(*null_law, cfg, target);
      cfg.c1 = res.c1;
      nlohmann::ordered_json out = to_json(cfg);
      nlohmann::ordered_json info;
      info["regime"] = to_string(target.regime);
      info["reps"] = target.reps;
      info["t_train"] = target.t_train;
      info["achieved_rate"] = res.rate;
      info["converged"] = res.converged;
      info["steps"] = res.history.size();
      out["calibration"] = info;
      write_json_file(cal_out, out);
      std::cerr << "c1 = " << res.c1 << ", rate " << res.rate
                << (res.converged ? "" : " (not inside the acceptance window)") << '\n';
      return 0;
    }

    if (*exp) {
      const ScenarioSpec spec = exp_scn.spec();
      DetectorConfig cfg = exp_det.base();
      if (exp_det.rho_auto() || (!exp_det.rho_hat && exp_det.config_path.empty())) {
        cfg.rho_hat = training_rho(Scenario(spec), exp_det.train_len, derive_seed(spec.seed, 2));
      }
      DetectorChoice choice;
      choice.kind = parse_detector_kind(detector_kind);
      choice.r0 = exp_r0;
      choice.strategy = NpStrategy::parse(exp_strategy);
      const ExperimentResult res = run_experiment(spec, cfg, choice, reps, spec.seed, threads);
      write_experiment(out_dir, res);
      std::cerr << aggregate_json(res).dump() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
