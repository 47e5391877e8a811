#include "netcpd/graph_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace netcpd {

void validate(const AdjacencySnapshot& s) {
  const Matrix& m = s.entries;
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("snapshot: matrix is not square");
  }
  if (s.time_index < 1) {
    throw std::invalid_argument("snapshot: time index must be positive");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0) {
      throw std::invalid_argument("snapshot: nonzero diagonal at node " + std::to_string(i + 1));
    }
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("snapshot: entry is not binary");
      }
      if (m(j, i) != v) {
        throw std::invalid_argument("snapshot: matrix is not symmetric");
      }
    }
  }
}

AdjacencySnapshot make_snapshot(Matrix entries, int time_index) {
  AdjacencySnapshot s{time_index, std::move(entries)};
  validate(s);
  return s;
}

void validate(const GraphonMatrix& g) {
  const Matrix& m = g.entries;
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("graphon: matrix is not square");
  }
  if (asymmetry(m) > 0.0) {
    throw std::invalid_argument("graphon: matrix is not symmetric");
  }
  if (m.size() > 0 && (m.minCoeff() < 0.0 || m.maxCoeff() > 1.0)) {
    throw std::invalid_argument("graphon: entries outside [0, 1]");
  }
}

GraphonMatrix make_graphon(Matrix entries) {
  GraphonMatrix g{std::move(entries)};
  validate(g);
  return g;
}

std::pair<double, double> cusum_weights(int s, int t) {
  if (s < 1 || s >= t) {
    throw std::invalid_argument("cusum: need 1 <= s < t");
  }
  const double sd = s;
  const double td = t;
  return {std::sqrt((td - sd) / (sd * td)), std::sqrt(sd / ((td - sd) * td))};
}

CusumState::CusumState(int n, bool windowed) : n_(n), windowed_(windowed) {
  if (n < 1) throw std::invalid_argument("CusumState: n must be positive");
  prefix_.push_back(Matrix::Zero(n, n));
}

void CusumState::append(const AdjacencySnapshot& a) {
  if (a.n() != n_) {
    throw std::invalid_argument("CusumState::append: dimension mismatch (" +
                                std::to_string(a.n()) + " vs " + std::to_string(n_) + ")");
  }
  if (a.time_index != t_ + 1) {
    throw std::invalid_argument("CusumState::append: expected time index " +
                                std::to_string(t_ + 1) + ", got " +
                                std::to_string(a.time_index));
  }
  validate(a);
  prefix_.push_back(prefix_.back() + a.entries);
  ++t_;
  if (windowed_) {
    while (first_kept_ < t_ / 2) {
      prefix_.pop_front();
      ++first_kept_;
    }
  }
}

const Matrix& CusumState::prefix(int u) const {
  if (u < first_kept_ || u > t_) {
    throw std::out_of_range("CusumState::prefix: index " + std::to_string(u) +
                            " not available");
  }
  return prefix_[static_cast<std::size_t>(u - first_kept_)];
}

CusumMatrix CusumState::cusum(int s, int t) const {
  if (t > t_) throw std::out_of_range("cusum: t exceeds stream length");
  const auto [before, after] = cusum_weights(s, t);
  const Matrix& ps = prefix(s);
  const Matrix& pt = prefix(t);
  CusumMatrix out{s, t, Matrix(n_, n_)};
  out.entries = (before + after) * ps - after * pt;
  return out;
}

void CusumState::reset() {
  t_ = 0;
  first_kept_ = 0;
  prefix_.clear();
  prefix_.push_back(Matrix::Zero(n_, n_));
}

std::vector<int> geometric_grid(int t) {
  if (t < 2) throw std::invalid_argument("geometric_grid: t must be at least 2");
  const int levels = std::bit_width(static_cast<unsigned>(t)) - 1;
  std::vector<int> grid;
  grid.reserve(static_cast<std::size_t>(levels));
  for (int j = 0; j < levels; ++j) grid.push_back(t - (1 << j));
  return grid;
}

JumpSize jump_size(const GraphonMatrix& before, const GraphonMatrix& after,
                   std::optional<double> rho) {
  if (before.n() != after.n()) {
    throw std::invalid_argument("jump_size: dimension mismatch");
  }
  const Matrix diff = before.entries - after.entries;
  const double r = rho.value_or(std::max(before.entries.size() ? before.entries.maxCoeff() : 0.0,
                                         after.entries.size() ? after.entries.maxCoeff() : 0.0));
  JumpSize out;
  out.kappa = diff.norm();
  if (out.kappa == 0.0) return out;
  if (r <= 0.0) {
    throw std::invalid_argument("jump_size: rho must be positive for a nonzero jump");
  }
  out.kappa0 = out.kappa / (before.n() * r);
  out.rank = numerical_rank(diff);
  return out;
}

ChangeScenario make_change_scenario(GraphonMatrix before, GraphonMatrix after,
                                    std::optional<int> delta, std::optional<double> rho) {
  validate(before);
  validate(after);
  if (delta && *delta < 1) {
    throw std::invalid_argument("change scenario: delta must be positive");
  }
  const double r = rho.value_or(std::max(before.entries.maxCoeff(), after.entries.maxCoeff()));
  const JumpSize jump = jump_size(before, after, r > 0.0 ? std::optional<double>(r) : std::nullopt);
  return ChangeScenario{std::move(before), std::move(after), delta, r,
                        jump.kappa, jump.kappa0, jump.rank};
}

Matrix expected_cusum(const ChangeScenario& scenario, int s, int t) {
  if (s < 1 || s >= t) throw std::invalid_argument("expected_cusum: need 1 <= s < t");
  const int n = scenario.n();
  if (!scenario.delta || t <= *scenario.delta) return Matrix::Zero(n, n);
  const double delta = *scenario.delta;
  const double sd = s;
  const double td = t;
  const Matrix diff = scenario.theta_before.entries - scenario.theta_after.entries;
  if (s <= *scenario.delta) {
    return (td - delta) * std::sqrt(sd / (td * (td - sd))) * diff;
  }
  return delta * std::sqrt((td - sd) / (sd * td)) * diff;
}

}  // namespace netcpd
