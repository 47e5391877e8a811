#include "netcpd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "netcpd/parallel.hpp"

namespace netcpd {
namespace {

// Critical levels of one null stream at split times 2, 3, ...; regenerated
// from the seed whenever a larger c1 needs a longer look.
struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<double> level;

  std::optional<int> first_fire(double c1) const {
    for (std::size_t k = 0; k < level.size(); ++k)
      if (c1 < level[k]) return static_cast<int>(k) + 2;
    return std::nullopt;
  }
};

class NullPanel {
 public:
  NullPanel(const Scenario& null_law, const DetectorConfig& cfg, const CalibrationTarget& target,
            const Denoiser& denoiser)
      : cfg_(cfg), target_(target), denoiser_(denoiser) {
    split_horizon_ = target.regime == CalibrationRegime::pfa ? target.t_train / 2
                                                             : target.arl_cap() / 2;
    scenario_ = std::make_shared<const Scenario>(null_law.null_law(2 * split_horizon_));
    traj_.resize(static_cast<std::size_t>(target.reps));
    for (int r = 0; r < target.reps; ++r) {
      traj_[static_cast<std::size_t>(r)].seed = derive_seed(target.seed, static_cast<std::uint64_t>(r));
    }
  }

  // Objective at c1. Streams are extended in rounds of growing length; when
  // the bounds from partially observed streams already decide `safe` against
  // `decided`, the bound is returned with exact = false.
  struct Rate {
    double value = 0.0;
    bool exact = true;
  };

  Rate rate(double c1, double decided) {
    const int max_len = split_horizon_ - 1;
    for (int budget = 32;; budget *= 2) {
      const int len = std::min(budget, max_len);
      parallel_for(
          static_cast<int>(traj_.size()),
          [&](int r) { extend(traj_[static_cast<std::size_t>(r)], c1, len); }, target_.threads);
      double known = 0.0;
      int open = 0;
      for (const Trajectory& tr : traj_) {
        const auto t = tr.first_fire(c1);
        const bool done = t || static_cast<int>(tr.level.size()) >= max_len;
        if (!done) ++open;
        if (target_.regime == CalibrationRegime::pfa) {
          known += t ? 1.0 : 0.0;
        } else if (t) {
          known += 2.0 * *t;
        } else {
          // Run length so far; exact once the cap is reached.
          known += done ? 2.0 * split_horizon_ : 2.0 * (static_cast<double>(tr.level.size()) + 1.0);
        }
      }
      const double reps = static_cast<double>(traj_.size());
      if (open == 0) return {known / reps, true};
      // Both objectives only grow as open streams are followed further.
      if (known / reps > decided) return {known / reps, false};
      if (len == max_len) return {known / reps, true};
    }
  }

 private:
  void extend(Trajectory& tr, double c1, int len) const {
    const auto max_len = static_cast<std::size_t>(len);
    if (tr.first_fire(c1) || tr.level.size() >= max_len) return;
    StreamSampler sampler(scenario_, tr.seed);
    SplitStreams streams(scenario_->n());
    const int known_split = static_cast<int>(tr.level.size()) + 1;
    for (int k = 0; k < 2 * known_split; ++k) streams.push_raw(*sampler.next());
    while (tr.level.size() < max_len) {
      streams.push_raw(*sampler.next());
      streams.push_raw(*sampler.next());
      const double m = critical_level(streams, cfg_, denoiser_);
      tr.level.push_back(m);
      if (c1 < m) return;
    }
  }

  DetectorConfig cfg_;
  CalibrationTarget target_;
  Denoiser denoiser_;
  int split_horizon_ = 0;
  std::shared_ptr<const Scenario> scenario_;
  std::vector<Trajectory> traj_;
};

double midpoint(double lo, double hi) {
  if (std::isinf(hi)) return 16.0 * lo;
  return std::sqrt(lo * hi);
}

void check_inputs(const Scenario& null_law, const DetectorConfig& cfg,
                  const CalibrationTarget& target) {
  target.validate();
  cfg.validate();
  if (null_law.delta()) throw std::invalid_argument("calibration: null law has a change point");
  if (!(cfg.rho_hat > 0.0)) throw std::invalid_argument("calibration: rho_hat must be set");
}

}  // namespace

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

double estimate_rho(std::span<const AdjacencySnapshot> training) {
  if (training.empty()) throw std::invalid_argument("estimate_rho: empty training sequence");
  const int n = training.front().n();
  if (n < 2) throw std::invalid_argument("estimate_rho: need at least two nodes");
  Matrix counts = Matrix::Zero(n, n);
  for (const auto& a : training) {
    if (a.n() != n) throw std::invalid_argument("estimate_rho: snapshot dimensions differ");
    counts += a.entries;
  }
  const double T = static_cast<double>(training.size());
  std::vector<double> freq;
  freq.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) freq.push_back(counts(i, j) / T);
  return std::clamp(nearest_rank_quantile(std::move(freq), 0.95), 1.0 / T, 1.0);
}

double training_rho(const Scenario& scenario, int t_train, std::uint64_t seed) {
  if (t_train < 1) throw std::invalid_argument("training_rho: t_train must be positive");
  StreamSampler sampler(std::make_shared<const Scenario>(scenario.null_law(t_train)), seed);
  const auto training = collect(sampler);
  return estimate_rho(training);
}

Scenario empirical_null(std::span<const AdjacencySnapshot> training, int horizon) {
  if (training.empty()) throw std::invalid_argument("empirical_null: empty training sequence");
  const int n = training.front().n();
  Matrix mean = Matrix::Zero(n, n);
  for (const auto& a : training) {
    if (a.n() != n) throw std::invalid_argument("empirical_null: snapshot dimensions differ");
    mean += a.entries;
  }
  mean /= static_cast<double>(training.size());
  ScenarioSpec spec;
  spec.kind = ScenarioKind::custom;
  spec.n = n;
  spec.delta = std::nullopt;
  spec.horizon = horizon;
  spec.custom_before = make_graphon(mean);
  spec.custom_after = spec.custom_before;
  return Scenario(std::move(spec));
}

std::string to_string(CalibrationRegime r) { return r == CalibrationRegime::pfa ? "pfa" : "arl"; }

CalibrationRegime parse_regime(const std::string& s) {
  if (s == "pfa") return CalibrationRegime::pfa;
  if (s == "arl") return CalibrationRegime::arl;
  throw std::invalid_argument("unknown calibration regime '" + s + "'");
}

void CalibrationTarget::validate() const {
  if (reps < 1) throw std::invalid_argument("calibration: reps must be at least 1");
  if (!(c1_low > 0.0) || !(c1_low < c1_high)) {
    throw std::invalid_argument("calibration: need 0 < c1_low < c1_high");
  }
  if (max_steps < 0) throw std::invalid_argument("calibration: max_steps must be non-negative");
  if (regime == CalibrationRegime::pfa) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("calibration: alpha in (0, 1)");
    if (t_train < 4) throw std::invalid_argument("calibration: t_train must be at least 4");
  } else if (gamma < 2) {
    throw std::invalid_argument("calibration: gamma must be at least 2");
  }
}

CalibrationResult calibrate_c1(const Scenario& null_law, const DetectorConfig& cfg,
                               const CalibrationTarget& target, const Denoiser& denoiser) {
  check_inputs(null_law, cfg, target);
  NullPanel panel(null_law, cfg, target, denoiser);
  const bool pfa = target.regime == CalibrationRegime::pfa;
  const double goal = pfa ? target.alpha : static_cast<double>(target.gamma);
  // safe: c1 at least as large as the target needs.
  auto accepted = [&](double f) {
    return pfa ? (f <= goal && f >= goal / 2.0) : (f >= goal && f <= 1.1 * goal);
  };
  auto safe = [&](double f) { return pfa ? f <= goal : f >= goal; };

  CalibrationResult res;
  // For pfa a lower bound above alpha is already unsafe; for arl one above
  // 1.1 gamma is safe but outside the window. Either way bisection can move on.
  const double decided = pfa ? goal : 1.1 * goal;
  auto eval = [&](double c1) {
    const auto r = panel.rate(c1, decided);
    res.history.push_back({c1, r.value, r.exact});
    return r.value;
  };

  double lo = target.c1_low;
  double hi = target.c1_high;
  const double f_lo = eval(lo);
  if (safe(f_lo)) {
    if (accepted(f_lo)) {
      res.c1 = lo;
      res.rate = f_lo;
      res.converged = true;
      return res;
    }
    const double f_hi = eval(hi);
    throw BracketError("calibration: c1 bracket does not straddle the target (rate " +
                           std::to_string(f_lo) + " at c1_low, " + std::to_string(f_hi) +
                           " at c1_high)",
                       f_lo, f_hi);
  }
  std::optional<double> f_hi_known;
  for (int step = 0; step < target.max_steps; ++step) {
    const double mid = midpoint(lo, hi);
    const double f = eval(mid);
    if (accepted(f)) {
      res.c1 = mid;
      res.rate = f;
      res.converged = true;
      return res;
    }
    if (safe(f)) {
      hi = mid;
      f_hi_known = f;
    } else {
      lo = mid;
    }
  }
  const double f_hi = f_hi_known ? *f_hi_known : eval(hi);
  if (!safe(f_hi)) {
    throw BracketError("calibration: c1 bracket does not straddle the target (rate " +
                           std::to_string(f_lo) + " at c1_low, " + std::to_string(f_hi) +
                           " at c1_high)",
                       f_lo, f_hi);
  }
  res.c1 = hi;
  res.rate = f_hi;
  res.converged = accepted(f_hi);
  return res;
}

double calibration_rate(const Scenario& null_law, const DetectorConfig& cfg,
                        const CalibrationTarget& target, const Denoiser& denoiser) {
  check_inputs(null_law, cfg, target);
  const bool pfa = target.regime == CalibrationRegime::pfa;
  const int raw_horizon = pfa ? 2 * (target.t_train / 2) : target.arl_cap();
  auto scenario = std::make_shared<const Scenario>(null_law.null_law(raw_horizon));
  std::vector<double> value(static_cast<std::size_t>(target.reps));
  parallel_for(
      target.reps,
      [&](int r) {
        StreamSampler sampler(scenario, derive_seed(target.seed, static_cast<std::uint64_t>(r)));
        const DetectionOutcome out = run(sampler, cfg, denoiser);
        double v;
        if (pfa) {
          v = out.fired ? 1.0 : 0.0;
        } else {
          v = out.fired ? static_cast<double>(*out.t_raw) : static_cast<double>(raw_horizon);
        }
        value[static_cast<std::size_t>(r)] = v;
      },
      target.threads);
  double acc = 0.0;
  for (double v : value) acc += v;
  return acc / static_cast<double>(value.size());
}

}  // namespace netcpd
