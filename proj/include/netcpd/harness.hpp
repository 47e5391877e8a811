#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcpd/detector.hpp"
#include "netcpd/generators.hpp"
#include "netcpd/np_detector.hpp"

namespace netcpd {

enum class DetectorKind { usvt, np };

std::string to_string(DetectorKind k);
DetectorKind parse_detector_kind(const std::string& s);

struct DetectorChoice {
  DetectorKind kind = DetectorKind::usvt;
  int r0 = 2;
  NpStrategy strategy = NpStrategy::exhaustive();
};

Denoiser make_denoiser(const DetectorChoice& choice);

/// Outcome of one replicate in raw time. t_tilde = min(T, t_raw), or T when
/// the detector never fired.
struct ReplicateRecord {
  std::uint64_t seed = 0;
  bool fired = false;
  std::optional<int> t_raw;
  int t_tilde = 0;
  std::optional<int> s_hit;
  double gate_value = 0.0;
  double score = 0.0;

  bool operator==(const ReplicateRecord&) const = default;
};

struct Metrics {
  std::optional<double> delay;  // empty when no replicate has t_tilde >= delta
  double pfa = 0.0;
};

/// Delay = mean of t_tilde - delta over records with t_tilde >= delta;
/// PFA = fraction with t_tilde < delta. Throws on empty input.
Metrics metrics(std::span<const ReplicateRecord> records, int delta, int horizon);

struct ExperimentResult {
  std::vector<ReplicateRecord> records;
  Metrics aggregate;
  int delta = 0;
  int horizon = 0;
  nlohmann::ordered_json config;
};

/// Replicate r uses the stream seed derive_seed(base_seed, r). A scenario
/// without a change point is scored with delta = horizon.
ExperimentResult run_experiment(const ScenarioSpec& spec, const DetectorConfig& cfg,
                                const DetectorChoice& choice, int n_reps,
                                std::uint64_t base_seed, int threads = 0);

/// One record for a finite observed stream, horizon = its length.
ReplicateRecord run_replicate(SnapshotSource& source, const DetectorConfig& cfg,
                              const Denoiser& denoiser, int horizon, std::uint64_t seed);

/// Columns: seed,fired,t_raw,t_tilde,s_hit,gate_value,score. Missing values
/// are empty fields; reals use 17 significant digits.
void write_csv(std::ostream& out, std::span<const ReplicateRecord> records);
std::vector<ReplicateRecord> read_csv(std::istream& in);

nlohmann::ordered_json aggregate_json(const ExperimentResult& result);

/// Writes results.csv, aggregate.json and config.json into `dir`.
void write_experiment(const std::string& dir, const ExperimentResult& result);

}  // namespace netcpd
