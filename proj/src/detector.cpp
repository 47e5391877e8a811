#include "netcpd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netcpd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sqrt(log(x)), or empty when log(x) would not be positive.
std::optional<double> sqrt_log(double x) {
  if (!(x > 1.0)) return std::nullopt;
  return std::sqrt(std::log(x));
}

double scaled(double c, double x) { return std::isinf(c) ? kInf : c * x; }

// Outcome of a scan at split time t, reporting the last grid point examined.
DetectionOutcome summarize(const std::vector<GridPoint>& points, int t) {
  DetectionOutcome out;
  if (points.empty()) return out;
  const GridPoint& last = points.back();
  out.gate_value = last.gate_value;
  out.score = last.score;
  out.threshold_used = last.thresholds.b;
  if (last.fired) {
    out.fired = true;
    out.t_split = t;
    out.t_raw = 2 * t;
    out.s_hit = last.s;
  }
  return out;
}

}  // namespace

std::string to_string(ControlMode m) { return m == ControlMode::alpha ? "alpha" : "arl"; }
std::string to_string(TauRule r) {
  return r == TauRule::theoretical ? "theoretical" : "practical";
}

ControlMode parse_control_mode(const std::string& s) {
  if (s == "alpha") return ControlMode::alpha;
  if (s == "arl") return ControlMode::arl;
  throw std::invalid_argument("unknown control mode '" + s + "'");
}

TauRule parse_tau_rule(const std::string& s) {
  if (s == "theoretical") return TauRule::theoretical;
  if (s == "practical") return TauRule::practical;
  throw std::invalid_argument("unknown tau rule '" + s + "'");
}

void DetectorConfig::validate() const {
  if (mode == ControlMode::alpha && !(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("detector: alpha must lie in (0, 1)");
  }
  if (mode == ControlMode::arl && gamma < 2) {
    throw std::invalid_argument("detector: gamma must be at least 2");
  }
  if (!(c_gate > 0.0)) throw std::invalid_argument("detector: c_gate must be positive");
  if (!(c1 > 0.0)) throw std::invalid_argument("detector: c1 must be positive");
  if (!(rho_hat >= 0.0 && rho_hat <= 1.0)) {
    throw std::invalid_argument("detector: rho_hat must lie in [0, 1]");
  }
  if (max_time && *max_time < 1) throw std::invalid_argument("detector: horizon must be positive");
}

std::optional<Thresholds> thresholds(const DetectorConfig& cfg, int s, int u, int n) {
  if (u < 2 || s < 1 || s >= u) {
    throw std::invalid_argument("thresholds: need 2 <= u and 1 <= s < u");
  }
  const double rho = cfg.rho_hat;
  const double ud = u;
  const double gap = u - s;
  const double ln2 = std::log(2.0);

  Thresholds th;
  th.tau2 = std::sqrt(gap * s / ud) * rho;

  std::optional<double> b_log;
  std::optional<double> gate_log;
  std::optional<double> tau_log;
  if (cfg.mode == ControlMode::alpha) {
    b_log = sqrt_log(ud / cfg.alpha);
    gate_log = b_log;
    if (cfg.tau_rule == TauRule::theoretical) {
      const auto l = sqrt_log(ud * (ud + 1.0) * std::log(ud) / (cfg.alpha * ln2));
      if (l) tau_log = std::sqrt(2.0) * *l;
    } else {
      const auto l = sqrt_log(2.0 * gap * (gap + 1.0) / cfg.alpha);
      if (l) tau_log = std::sqrt(2.0) * *l / 15.0;
    }
  } else {
    const double g = cfg.gamma;
    b_log = sqrt_log(g);
    gate_log = b_log;
    if (cfg.tau_rule == TauRule::theoretical) {
      const auto l = sqrt_log(2.0 * (g + 1.0) * g * std::log(g + 1.0) / ln2);
      if (l) tau_log = std::sqrt(2.0) * *l;
    } else {
      const auto l = sqrt_log(2.0 * g + 2.0);
      if (l) tau_log = std::sqrt(2.0) * *l / 15.0;
    }
  }
  if (!b_log || !gate_log || !tau_log) return std::nullopt;

  const double base = cfg.tau_rule == TauRule::theoretical ? cfg.c_gate : 0.2;
  th.tau1 = base * std::sqrt(n * rho) + *tau_log;
  th.b = scaled(cfg.c1, std::sqrt(rho) * *b_log);
  th.gate = cfg.c_gate * *gate_log;
  return th;
}

Denoiser usvt_denoiser() {
  return [](const CusumMatrix& bhat, const Thresholds& th) {
    return usvt(bhat.entries, UsvtParams{th.tau1, th.tau2});
  };
}

bool SplitStreams::push_raw(const AdjacencySnapshot& raw) {
  const int local = raw_t + 1;
  AdjacencySnapshot routed{(local + 1) / 2, raw.entries};
  if (local % 2 == 1) {
    a.append(routed);
  } else {
    b.append(routed);
  }
  raw_t = local;
  return local % 2 == 0;
}

void SplitStreams::reset() {
  a.reset();
  b.reset();
  raw_t = 0;
}

std::vector<GridPoint> scan_grid(const SplitStreams& streams, const DetectorConfig& cfg,
                                 const Denoiser& denoiser, bool stop_at_first_fire) {
  const int t = streams.b.t();
  if (t < 2 || streams.a.t() < t) {
    throw std::logic_error("scan_grid: streams not ready for a scan");
  }
  std::vector<GridPoint> points;
  for (int s : geometric_grid(t)) {
    const auto th = thresholds(cfg, s, t, streams.n());
    if (!th) continue;
    GridPoint p;
    p.s = s;
    p.thresholds = *th;
    const Matrix b_tilde = denoiser(streams.b.cusum(s, t), *th);
    p.gate_value = b_tilde.norm();
    if (p.gate_value > 0.0) {
      const Matrix a_hat = streams.a.cusum(s, t).entries;
      p.score = a_hat.cwiseProduct(b_tilde).sum() / p.gate_value;
      if (cfg.use_absolute_inner_product) p.score = std::abs(p.score);
    }
    p.fired = p.gate_value > th->gate && p.score > th->b;
    points.push_back(p);
    if (p.fired && stop_at_first_fire) break;
  }
  return points;
}

DetectionOutcome step(SplitStreams& streams, const DetectorConfig& cfg,
                      const AdjacencySnapshot& a_new, const AdjacencySnapshot* b_new,
                      const Denoiser& denoiser) {
  if (b_new && b_new->n() != a_new.n()) {
    throw std::invalid_argument("step: snapshot dimensions differ");
  }
  streams.a.append(a_new);
  streams.raw_t += 1;
  DetectionOutcome out;
  if (!b_new) return out;
  streams.b.append(*b_new);
  streams.raw_t += 1;
  const int t = streams.b.t();
  if (t < 2) return out;
  return summarize(scan_grid(streams, cfg, denoiser, true), t);
}

Detector::Detector(int n, DetectorConfig cfg, Denoiser denoiser, bool windowed)
    : cfg_(cfg), denoiser_(std::move(denoiser)), streams_(n, windowed) {
  cfg_.validate();
}

DetectionOutcome Detector::push(const AdjacencySnapshot& raw) {
  if (raw.n() != streams_.n()) {
    throw std::invalid_argument("Detector::push: dimension mismatch");
  }
  if (raw.time_index != raw_consumed() + 1) {
    throw std::invalid_argument("Detector::push: expected raw time index " +
                                std::to_string(raw_consumed() + 1) + ", got " +
                                std::to_string(raw.time_index));
  }
  DetectionOutcome out;
  out.raw_offset = raw_offset_;
  if (!streams_.push_raw(raw) || streams_.b.t() < 2) {
    // Keep the latest diagnostics visible between scans.
    out.gate_value = last_.gate_value;
    out.score = last_.score;
    out.threshold_used = last_.threshold_used;
    return out;
  }
  out = summarize(scan_grid(streams_, cfg_, denoiser_, true), streams_.b.t());
  out.raw_offset = raw_offset_;
  last_ = out;
  return out;
}

void Detector::restart() {
  raw_offset_ += streams_.raw_t;
  streams_.reset();
  last_ = DetectionOutcome{};
}

namespace {

// Pulls snapshots into `detector` until it fires, the source runs dry or the
// horizon is reached. Empty when the source was exhausted before any input.
std::optional<DetectionOutcome> drive(SnapshotSource& source, std::optional<Detector>& detector,
                                      const DetectorConfig& cfg, const Denoiser& denoiser) {
  std::optional<DetectionOutcome> last;
  for (;;) {
    const int consumed = detector ? detector->raw_consumed() : 0;
    if (cfg.max_time && consumed >= *cfg.max_time) return last;
    auto snap = source.next();
    if (!snap) return last;
    if (!detector) detector.emplace(snap->n(), cfg, denoiser);
    last = detector->push(*snap);
    if (last->fired) return last;
  }
}

}  // namespace

DetectionOutcome run(SnapshotSource& source, const DetectorConfig& cfg,
                     const Denoiser& denoiser) {
  cfg.validate();
  std::optional<Detector> detector;
  auto out = drive(source, detector, cfg, denoiser);
  if (!detector) throw std::invalid_argument("run: empty source");
  return out.value_or(DetectionOutcome{});
}

std::vector<DetectionOutcome> run_multi(SnapshotSource& source, const DetectorConfig& cfg,
                                        const Denoiser& denoiser) {
  cfg.validate();
  std::optional<Detector> detector;
  std::vector<DetectionOutcome> fired;
  for (;;) {
    auto out = drive(source, detector, cfg, denoiser);
    if (!detector) throw std::invalid_argument("run_multi: empty source");
    if (!out || !out->fired) break;
    fired.push_back(*out);
    detector->restart();
  }
  return fired;
}

double critical_level(const SplitStreams& streams, const DetectorConfig& cfg,
                      const Denoiser& denoiser) {
  DetectorConfig unit = cfg;
  unit.c1 = 1.0;
  double level = -kInf;
  for (const GridPoint& p : scan_grid(streams, unit, denoiser, false)) {
    if (!(p.gate_value > p.thresholds.gate)) continue;
    double ratio;
    if (p.thresholds.b > 0.0) {
      ratio = p.score / p.thresholds.b;
    } else {
      ratio = p.score > 0.0 ? kInf : -kInf;
    }
    level = std::max(level, ratio);
  }
  return level;
}

}  // namespace netcpd
