#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "netcpd/graph_core.hpp"
#include "netcpd/snapshot_io.hpp"
#include "netcpd/usvt.hpp"

namespace netcpd {

enum class ControlMode {
  alpha,  // overall Type-I error at most alpha
  arl,    // average run length at least gamma
};

enum class TauRule { theoretical, practical };

std::string to_string(ControlMode m);
std::string to_string(TauRule r);
ControlMode parse_control_mode(const std::string& s);
TauRule parse_tau_rule(const std::string& s);

/// Tuning of the online detector.
///
/// `c_gate` is the constant C of the Frobenius gate; under the theoretical
/// tau rule it also scales the sqrt(n rho) term of the eigenvalue cutoff.
/// `c1` scales the score threshold b_u and is what calibration searches
/// over; +infinity disables firing. `max_time` is a raw-stream horizon.
struct DetectorConfig {
  ControlMode mode = ControlMode::alpha;
  double alpha = 0.05;
  int gamma = 150;
  double c_gate = 1.0;
  double c1 = 1.0;
  double rho_hat = 0.0;
  TauRule tau_rule = TauRule::practical;
  bool use_absolute_inner_product = false;
  std::optional<int> max_time;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct Thresholds {
  double b = 0.0;     // score threshold b_u
  double tau1 = 0.0;  // eigenvalue cutoff
  double tau2 = 0.0;  // entry clip level
  double gate = 0.0;  // Frobenius gate C log^{1/2}(.)
};

/// Thresholds for split point s at split-stream time u on n nodes. Empty when a
/// logarithm argument is <= 1, in which case the grid point is skipped.
std::optional<Thresholds> thresholds(const DetectorConfig& cfg, int s, int u, int n);

/// Maps the direction-stream CUSUM matrix to the low-noise estimate used in
/// the score (USVT for the polynomial-time detector).
using Denoiser = std::function<Matrix(const CusumMatrix&, const Thresholds&)>;

Denoiser usvt_denoiser();

/// Odd raw snapshots feed the scoring stream `a`, even ones the direction
/// stream `b`. Raw indices are local to the current segment (1-based).
struct SplitStreams {
  CusumState a;
  CusumState b;
  int raw_t = 0;

  explicit SplitStreams(int n, bool windowed = false) : a(n, windowed), b(n, windowed) {}

  int n() const { return a.n(); }

  /// Routes the next raw snapshot by parity of raw_t + 1; returns true when
  /// the direction stream advanced. The snapshot's own time index is ignored.
  bool push_raw(const AdjacencySnapshot& raw);
  void reset();
};

/// Evaluation of one candidate split point at the current time.
struct GridPoint {
  int s = 0;
  Thresholds thresholds;
  double gate_value = 0.0;  // ||B~||_F
  double score = 0.0;       // <A^, B~ / ||B~||_F>, 0 when B~ == 0
  bool fired = false;
};

/// Scans the geometric grid at t = streams.b.t() (j = 0 upward). Requires
/// streams.a.t() >= t >= 2. Grid points whose thresholds are undefined are
/// skipped.
std::vector<GridPoint> scan_grid(const SplitStreams& streams, const DetectorConfig& cfg,
                                 const Denoiser& denoiser, bool stop_at_first_fire);

struct DetectionOutcome {
  bool fired = false;
  std::optional<int> t_split;
  std::optional<int> t_raw;  // 2 * t_split, relative to the segment start
  std::optional<int> s_hit;
  double gate_value = 0.0;
  double score = 0.0;
  double threshold_used = 0.0;
  int raw_offset = 0;  // raw snapshots consumed before this segment began

  std::optional<int> absolute_raw() const {
    return t_raw ? std::optional<int>(*t_raw + raw_offset) : std::nullopt;
  }
};

/// One detector step on split-stream snapshots. `a_new` and `b_new` carry
/// split-stream time indices. Without `b_new` only the scoring stream grows
/// and nothing is scanned.
DetectionOutcome step(SplitStreams& streams, const DetectorConfig& cfg,
                      const AdjacencySnapshot& a_new, const AdjacencySnapshot* b_new,
                      const Denoiser& denoiser = usvt_denoiser());

/// Stateful online detector over a raw snapshot stream.
class Detector {
 public:
  Detector(int n, DetectorConfig cfg, Denoiser denoiser = usvt_denoiser(),
           bool windowed = false);

  /// Consumes the next raw snapshot. Raw time indices must be consecutive
  /// across the whole stream, restarts included.
  DetectionOutcome push(const AdjacencySnapshot& raw);

  /// Empties both split streams; the next raw snapshot starts a new segment.
  void restart();

  const SplitStreams& streams() const { return streams_; }
  const DetectorConfig& config() const { return cfg_; }
  int raw_consumed() const { return raw_offset_ + streams_.raw_t; }

 private:
  DetectorConfig cfg_;
  Denoiser denoiser_;
  SplitStreams streams_;
  int raw_offset_ = 0;
  DetectionOutcome last_;
};

/// Runs until the first firing, source exhaustion or cfg.max_time.
/// Throws std::invalid_argument on an empty source.
DetectionOutcome run(SnapshotSource& source, const DetectorConfig& cfg,
                     const Denoiser& denoiser = usvt_denoiser());

/// Restarts after every firing; returns the fired outcomes in order.
std::vector<DetectionOutcome> run_multi(SnapshotSource& source, const DetectorConfig& cfg,
                                        const Denoiser& denoiser = usvt_denoiser());

/// Smallest c1 that would suppress a firing at the current time: the largest
/// score / b_u over grid points passing the gate, with b_u evaluated at c1 = 1.
/// -infinity when no grid point passes the gate. A stream fires at this time
/// under constant c1 exactly when c1 < critical_level(...).
double critical_level(const SplitStreams& streams, const DetectorConfig& cfg,
                      const Denoiser& denoiser);

}  // namespace netcpd
