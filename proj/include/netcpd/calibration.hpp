#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcpd/detector.hpp"
#include "netcpd/generators.hpp"

namespace netcpd {

/// 0.95 empirical quantile (nearest rank) over pairs i < j of the
/// time-averaged edge frequencies, clamped to [1/T, 1].
double estimate_rho(std::span<const AdjacencySnapshot> training);

/// estimate_rho on t_train raw snapshots sampled from the pre-change law.
double training_rho(const Scenario& scenario, int t_train, std::uint64_t seed);

/// Change-free law whose graphon is the time-averaged training adjacency.
Scenario empirical_null(std::span<const AdjacencySnapshot> training, int horizon);

/// Nearest-rank quantile: the ceil(q m)-th smallest of m values.
double nearest_rank_quantile(std::vector<double> values, double q);

enum class CalibrationRegime {
  pfa,  // false-alarm fraction within the training horizon
  arl,  // mean run length
};

std::string to_string(CalibrationRegime r);
CalibrationRegime parse_regime(const std::string& s);

struct CalibrationTarget {
  CalibrationRegime regime = CalibrationRegime::pfa;
  double alpha = 0.05;
  int t_train = 200;  // raw snapshots
  int gamma = 150;    // raw snapshots
  int reps = 200;
  double c1_low = 0.05;
  double c1_high = 50.0;
  int max_steps = 40;
  std::uint64_t seed = 1;
  int threads = 0;

  void validate() const;
  /// Raw run-length cap for the ARL regime.
  int arl_cap() const { return 10 * gamma; }
};

struct CalibrationStep {
  double c1 = 0.0;
  double rate = 0.0;  // firing fraction (pfa) or capped mean run length (arl)
  bool exact = true;  // false: a lower bound that already settled the comparison
};

struct CalibrationResult {
  double c1 = 0.0;
  double rate = 0.0;
  bool converged = false;  // rate inside the acceptance window
  std::vector<CalibrationStep> history;
};

/// The search bracket does not straddle the target.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double rate_low, double rate_high)
      : std::runtime_error(what), rate_low(rate_low), rate_high(rate_high) {}
  double rate_low;
  double rate_high;
};

/// Bisection on c1 over a fixed set of null streams (common random numbers).
///
/// pfa: fraction of `reps` streams firing at raw time <= t_train; accepted in
/// [alpha / 2, alpha]. arl: mean raw run length capped at 10 gamma; accepted in
/// [gamma, 1.1 gamma]. Otherwise returns the conservative endpoint after
/// max_steps. `null_law` must carry no change point; cfg.rho_hat must be set.
CalibrationResult calibrate_c1(const Scenario& null_law, const DetectorConfig& cfg,
                               const CalibrationTarget& target,
                               const Denoiser& denoiser = usvt_denoiser());

/// Direct (non-lazy) evaluation of the calibration objective at cfg.c1 on the
/// same seed list calibrate_c1 uses.
double calibration_rate(const Scenario& null_law, const DetectorConfig& cfg,
                        const CalibrationTarget& target,
                        const Denoiser& denoiser = usvt_denoiser());

}  // namespace netcpd
