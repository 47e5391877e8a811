#include "netcpd/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "netcpd/config_io.hpp"
#include "netcpd/parallel.hpp"

namespace netcpd {
namespace {

const char* const kHeader = "seed,fired,t_raw,t_tilde,s_hit,gate_value,score";

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::optional<int> optional_int(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stoi(field);
}

}  // namespace

std::string to_string(DetectorKind k) { return k == DetectorKind::usvt ? "usvt" : "np"; }

DetectorKind parse_detector_kind(const std::string& s) {
  if (s == "usvt") return DetectorKind::usvt;
  if (s == "np") return DetectorKind::np;
  throw std::invalid_argument("unknown detector '" + s + "'");
}

Denoiser make_denoiser(const DetectorChoice& choice) {
  if (choice.kind == DetectorKind::np) return np_denoiser(choice.r0, choice.strategy);
  return usvt_denoiser();
}

Metrics metrics(std::span<const ReplicateRecord> records, int delta, int horizon) {
  if (records.empty()) throw std::invalid_argument("metrics: no records");
  if (delta > horizon) throw std::invalid_argument("metrics: delta beyond the horizon");
  double late_sum = 0.0;
  int late = 0;
  int early = 0;
  for (const auto& r : records) {
    if (r.t_tilde >= delta) {
      late_sum += r.t_tilde - delta;
      ++late;
    } else {
      ++early;
    }
  }
  Metrics m;
  if (late > 0) m.delay = late_sum / late;
  m.pfa = static_cast<double>(early) / static_cast<double>(records.size());
  return m;
}

ReplicateRecord run_replicate(SnapshotSource& source, const DetectorConfig& cfg,
                              const Denoiser& denoiser, int horizon, std::uint64_t seed) {
  DetectorConfig c = cfg;
  c.max_time = c.max_time ? std::min(*c.max_time, horizon) : horizon;
  const DetectionOutcome out = run(source, c, denoiser);
  ReplicateRecord rec;
  rec.seed = seed;
  rec.fired = out.fired;
  rec.t_raw = out.t_raw;
  rec.t_tilde = out.t_raw ? std::min(horizon, *out.t_raw) : horizon;
  rec.s_hit = out.s_hit;
  rec.gate_value = out.gate_value;
  rec.score = out.score;
  return rec;
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const DetectorConfig& cfg,
                                const DetectorChoice& choice, int n_reps,
                                std::uint64_t base_seed, int threads) {
  if (n_reps < 1) throw std::invalid_argument("run_experiment: need at least one replicate");
  cfg.validate();
  auto scenario = std::make_shared<const Scenario>(spec);
  const Denoiser denoiser = make_denoiser(choice);
  ExperimentResult res;
  res.horizon = spec.horizon;
  res.delta = spec.delta.value_or(spec.horizon);
  res.records.resize(static_cast<std::size_t>(n_reps));
  parallel_for(
      n_reps,
      [&](int r) {
        const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(r));
        StreamSampler sampler(scenario, seed);
        res.records[static_cast<std::size_t>(r)] =
            run_replicate(sampler, cfg, denoiser, spec.horizon, seed);
      },
      threads);
  res.aggregate = metrics(res.records, res.delta, res.horizon);

  nlohmann::ordered_json config;
  config["scenario"] = to_json(spec);
  config["detector"] = to_json(cfg);
  config["detector_kind"] = to_string(choice.kind);
  if (choice.kind == DetectorKind::np) {
    config["r0"] = choice.r0;
    config["strategy"] = choice.strategy.describe();
  }
  config["reps"] = n_reps;
  config["base_seed"] = base_seed;
  res.config = std::move(config);
  return res;
}

void write_csv(std::ostream& out, std::span<const ReplicateRecord> records) {
  out << kHeader << '\n';
  for (const auto& r : records) {
    out << r.seed << ',' << (r.fired ? 1 : 0) << ',';
    if (r.t_raw) out << *r.t_raw;
    out << ',' << r.t_tilde << ',';
    if (r.s_hit) out << *r.s_hit;
    out << ',' << format_real(r.gate_value) << ',' << format_real(r.score) << '\n';
  }
}

std::vector<ReplicateRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("read_csv: missing or unexpected header");
  }
  std::vector<ReplicateRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 7) {
      throw std::runtime_error("read_csv: line " + std::to_string(line_no) + " has " +
                               std::to_string(f.size()) + " fields");
    }
    try {
      ReplicateRecord r;
      r.seed = std::stoull(f[0]);
      r.fired = f[1] == "1";
      r.t_raw = optional_int(f[2]);
      r.t_tilde = std::stoi(f[3]);
      r.s_hit = optional_int(f[4]);
      r.gate_value = std::stod(f[5]);
      r.score = std::stod(f[6]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("read_csv: malformed line " + std::to_string(line_no));
    }
  }
  return out;
}

nlohmann::ordered_json aggregate_json(const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["reps"] = result.records.size();
  j["delta"] = result.delta;
  j["horizon"] = result.horizon;
  if (result.aggregate.delay) {
    j["delay"] = *result.aggregate.delay;
  } else {
    j["delay"] = nullptr;
  }
  j["pfa"] = result.aggregate.pfa;
  j["fired"] = std::count_if(result.records.begin(), result.records.end(),
                             [](const ReplicateRecord& r) { return r.fired; });
  return j;
}

void write_experiment(const std::string& dir, const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream csv(base / "results.csv");
  if (!csv) throw std::runtime_error("cannot write " + (base / "results.csv").string());
  write_csv(csv, result.records);
  write_json_file((base / "aggregate.json").string(), aggregate_json(result));
  write_json_file((base / "config.json").string(), result.config);
}

}  // namespace netcpd
