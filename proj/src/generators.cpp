#include "netcpd/generators.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace netcpd {
namespace {

constexpr double kSbmRho = 0.02;

using Table3 = std::array<std::array<double, 3>, 3>;

constexpr Table3 kSbm3Before{{{0.6, 1.0, 0.6}, {1.0, 0.6, 0.5}, {0.6, 0.5, 0.6}}};
constexpr Table3 kSbm3After{{{0.6, 0.5, 0.6}, {0.5, 0.6, 1.0}, {0.6, 1.0, 0.6}}};

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix zero_diagonal(Matrix m) {
  m.diagonal().setZero();
  return m;
}

template <class Cell>
GraphonMatrix block_graphon(const std::vector<int>& z, Cell cell) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      m(i, j) = cell(i, j, z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
  return make_graphon(zero_diagonal(std::move(m)));
}

GraphonMatrix cosine_graphon(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  const Vector norms = rows.rowwise().norm();
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      m(i, j) = rows.row(i).dot(rows.row(j)) / (norms[i] * norms[j]);
  // Exact symmetry and [0, 1] range despite rounding.
  m = 0.5 * (m + m.transpose()).eval();
  m = m.cwiseMax(0.0).cwiseMin(1.0);
  return make_graphon(zero_diagonal(std::move(m)));
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::sbm3: return "sbm3";
    case ScenarioKind::sbm5: return "sbm5";
    case ScenarioKind::dcbm: return "dcbm";
    case ScenarioKind::rdpg: return "rdpg";
    case ScenarioKind::custom: return "custom";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "1" || s == "sbm3") return ScenarioKind::sbm3;
  if (s == "2" || s == "sbm5") return ScenarioKind::sbm5;
  if (s == "3" || s == "dcbm") return ScenarioKind::dcbm;
  if (s == "4" || s == "rdpg") return ScenarioKind::rdpg;
  if (s == "custom") return ScenarioKind::custom;
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

void ScenarioSpec::validate() const {
  if (n < 2) throw std::invalid_argument("scenario: need at least two nodes");
  if (horizon < 1) throw std::invalid_argument("scenario: horizon must be positive");
  if (delta && (*delta < 1 || *delta >= horizon)) {
    throw std::invalid_argument("scenario: change point must satisfy 1 <= delta < horizon");
  }
  if (kind == ScenarioKind::sbm3 || kind == ScenarioKind::dcbm) {
    if (n < 3) throw std::invalid_argument("scenario: three communities need n >= 3");
  }
  if (kind == ScenarioKind::sbm5 && n < 5) {
    throw std::invalid_argument("scenario: five communities need n >= 5");
  }
  if (kind == ScenarioKind::custom) {
    if (!custom_before || !custom_after) {
      throw std::invalid_argument("scenario: custom kind needs both graphons");
    }
    if (custom_before->n() != n || custom_after->n() != n) {
      throw std::invalid_argument("scenario: custom graphon size differs from n");
    }
  }
}

std::vector<int> community_labels(int n, int blocks) {
  std::vector<int> z(static_cast<std::size_t>(n));
  const int size = n / blocks;
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = std::min(i / size, blocks - 1);
  return z;
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int n = spec_.n;
  GraphonMatrix before;
  GraphonMatrix after;
  switch (spec_.kind) {
    case ScenarioKind::sbm3: {
      const auto z = community_labels(n, 3);
      before = block_graphon(z, [](auto, auto, int a, int b) {
        return kSbmRho * kSbm3Before[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      });
      after = block_graphon(z, [](auto, auto, int a, int b) {
        return kSbmRho * kSbm3After[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      });
      break;
    }
    case ScenarioKind::sbm5: {
      const auto z = community_labels(n, 5);
      before = block_graphon(z, [](auto, auto, int a, int b) {
        return kSbmRho * (a == b ? 0.9 : 0.2);
      });
      after = block_graphon(z, [](auto, auto, int a, int b) {
        return kSbmRho * (a == b ? 0.5 : 0.1);
      });
      break;
    }
    case ScenarioKind::dcbm: {
      const auto z = community_labels(n, 3);
      auto degree = [n](Eigen::Index i) { return std::sqrt(static_cast<double>(i + 1) / n); };
      before = block_graphon(z, [&](Eigen::Index i, Eigen::Index j, int a, int b) {
        return degree(i) * degree(j) * (a == b ? 0.9 : 0.1);
      });
      after = block_graphon(z, [&](Eigen::Index i, Eigen::Index j, int a, int b) {
        return degree(i) * degree(j) * (a == b ? 0.95 : 0.15);
      });
      break;
    }
    case ScenarioKind::rdpg: {
      std::mt19937_64 rng(derive_seed(spec_.seed, 0));
      LatentPositions lp{Matrix(n, 5), Matrix(n, 5)};
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < 5; ++k) lp.x(i, k) = uniform01(rng);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < 5; ++k) lp.x_tilde(i, k) = uniform01(rng);
      Matrix y = lp.x;
      y.topRows(n / 4) = lp.x_tilde.topRows(n / 4);
      before = cosine_graphon(lp.x);
      after = cosine_graphon(y);
      latent_ = std::move(lp);
      break;
    }
    case ScenarioKind::custom:
      before = *spec_.custom_before;
      after = *spec_.custom_after;
      validate(before);
      validate(after);
      break;
  }
  truth_ = make_change_scenario(std::move(before), std::move(after), spec_.delta);
}

const GraphonMatrix& Scenario::graphon_at(int t) const {
  if (t < 1 || t > spec_.horizon) {
    throw std::out_of_range("graphon_at: time " + std::to_string(t) + " outside [1, " +
                            std::to_string(spec_.horizon) + "]");
  }
  return (spec_.delta && t > *spec_.delta) ? truth_.theta_after : truth_.theta_before;
}

Scenario Scenario::null_law(int horizon) const {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::custom;
  spec.n = spec_.n;
  spec.delta = std::nullopt;
  spec.horizon = horizon;
  spec.seed = spec_.seed;
  spec.custom_before = truth_.theta_before;
  spec.custom_after = truth_.theta_before;
  return Scenario(std::move(spec));
}

GraphonMatrix graphon_of(const ScenarioSpec& spec, int t) { return Scenario(spec).graphon_at(t); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finaliser over a golden-ratio stride.
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

StreamSampler::StreamSampler(std::shared_ptr<const Scenario> scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), rng_(seed) {
  if (!scenario_) throw std::invalid_argument("StreamSampler: null scenario");
}

std::optional<AdjacencySnapshot> StreamSampler::next() {
  if (t_ >= scenario_->horizon()) return std::nullopt;
  ++t_;
  const Matrix& p = scenario_->graphon_at(t_).entries;
  const Eigen::Index n = p.rows();
  AdjacencySnapshot snap{t_, Matrix::Zero(n, n)};
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (uniform01(rng_) < p(i, j)) {
        snap.entries(i, j) = 1.0;
        snap.entries(j, i) = 1.0;
      }
    }
  }
  return snap;
}

std::pair<StreamSampler, ChangeScenario> sample_stream(const ScenarioSpec& spec) {
  auto scenario = std::make_shared<const Scenario>(spec);
  ChangeScenario truth = scenario->truth();
  return {StreamSampler(std::move(scenario), derive_seed(spec.seed, 1)), std::move(truth)};
}

std::vector<AdjacencySnapshot> collect(SnapshotSource& source, int max_count) {
  std::vector<AdjacencySnapshot> out;
  while (max_count < 0 || static_cast<int>(out.size()) < max_count) {
    auto s = source.next();
    if (!s) break;
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace netcpd
