#include "netcpd/np_detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace netcpd {
namespace {

void check_input(const Matrix& m, int r0) {
  if (r0 < 1) throw std::invalid_argument("np_fit: r0 must be at least 1");
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("np_fit: need a nonempty square matrix");
  }
}

// Loss for fixed labels at the closed-form optimum, via block sums:
// sum m^2 - sum_ab S_ab^2 / N_ab over off-diagonal cells.
double profile_loss(const Matrix& m, const std::vector<int>& z, int r0, double total_sq,
                    std::vector<double>& sums, std::vector<double>& counts) {
  std::fill(sums.begin(), sums.end(), 0.0);
  std::fill(counts.begin(), counts.end(), 0.0);
  const auto n = static_cast<int>(z.size());
  for (int j = 0; j < n; ++j) {
    const int zj = z[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const auto cell = static_cast<std::size_t>(z[static_cast<std::size_t>(i)] * r0 + zj);
      sums[cell] += m(i, j);
      counts[cell] += 1.0;
    }
  }
  double explained = 0.0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    if (counts[c] > 0.0) explained += sums[c] * sums[c] / counts[c];
  }
  return total_sq - explained;
}

double off_diagonal_sq(const Matrix& m) {
  return m.squaredNorm() - m.diagonal().squaredNorm();
}

BlockFit assemble(const Matrix& m, BlockAssignment z) {
  BlockFit fit;
  fit.q = optimal_block_means(m, z);
  fit.loss = block_loss(m, fit.q, z);
  const int n = z.n();
  fit.fitted = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j) fit.fitted(i, j) = fit.q(z.labels[static_cast<std::size_t>(i)],
                                           z.labels[static_cast<std::size_t>(j)]);
  fit.z = std::move(z);
  return fit;
}

BlockFit fit_exhaustive(const Matrix& m, int r0) {
  const int n = static_cast<int>(m.rows());
  if (std::pow(static_cast<double>(r0), n) > kExhaustiveLimit) {
    throw std::invalid_argument("np_fit: exhaustive search over r0^n labellings exceeds limit");
  }
  const double total_sq = off_diagonal_sq(m);
  std::vector<double> sums(static_cast<std::size_t>(r0 * r0));
  std::vector<double> counts(sums.size());
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  std::vector<int> best = z;
  double best_loss = std::numeric_limits<double>::infinity();
  for (;;) {
    const double loss = profile_loss(m, z, r0, total_sq, sums, counts);
    if (loss < best_loss) {
      best_loss = loss;
      best = z;
    }
    // Odometer increment over {0..r0-1}^n.
    int k = 0;
    while (k < n && ++z[static_cast<std::size_t>(k)] == r0) z[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return assemble(m, BlockAssignment{std::move(best), r0});
}

std::vector<int> spectral_seed(const Matrix& m, int r0) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  if (r0 >= n) {
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = i;
    return z;
  }
  if (r0 == 1) return z;
  int bits = 0;
  while ((1 << bits) < r0) ++bits;
  const EigenDecomposition eig = eigh(m);
  bits = std::min(bits, n);
  for (int i = 0; i < n; ++i) {
    int code = 0;
    for (int b = 0; b < bits; ++b)
      if (eig.eigenvectors(i, b) >= 0.0) code |= 1 << b;
    z[static_cast<std::size_t>(i)] = code % r0;
  }
  return z;
}

std::vector<int> refine(const Matrix& m, std::vector<int> z, int r0, int max_iters) {
  const int n = static_cast<int>(m.rows());
  for (int iter = 0; iter < max_iters; ++iter) {
    const Matrix q = optimal_block_means(m, BlockAssignment{z, r0});
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      int best_label = z[static_cast<std::size_t>(i)];
      double best_cost = std::numeric_limits<double>::infinity();
      for (int a = 0; a < r0; ++a) {
        double cost = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const double d = m(i, j) - q(a, z[static_cast<std::size_t>(j)]);
          cost += d * d;
        }
        // Ties keep the current label so the sweep terminates.
        if (cost < best_cost ||
            (cost == best_cost && a == z[static_cast<std::size_t>(i)])) {
          best_cost = cost;
          best_label = a;
        }
      }
      if (best_label != z[static_cast<std::size_t>(i)]) {
        z[static_cast<std::size_t>(i)] = best_label;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return z;
}

BlockFit fit_alternating(const Matrix& m, int r0, const NpStrategy& strategy) {
  if (strategy.restarts < 1 || strategy.max_iters < 1) {
    throw std::invalid_argument("np_fit: alternating strategy needs restarts, iters >= 1");
  }
  const int n = static_cast<int>(m.rows());
  std::optional<BlockFit> best;
  for (int r = 0; r < strategy.restarts; ++r) {
    std::vector<int> z;
    if (r == 0) {
      z = spectral_seed(m, r0);
    } else {
      std::mt19937_64 rng(strategy.seed + static_cast<std::uint64_t>(r));
      std::uniform_int_distribution<int> label(0, r0 - 1);
      z.resize(static_cast<std::size_t>(n));
      for (auto& l : z) l = label(rng);
    }
    BlockFit fit = assemble(m, BlockAssignment{refine(m, std::move(z), r0, strategy.max_iters), r0});
    if (!best || fit.loss < best->loss) best = std::move(fit);
  }
  return std::move(*best);
}

}  // namespace

void validate(const BlockAssignment& z) {
  if (z.blocks < 1) throw std::invalid_argument("block assignment: need at least one block");
  for (int l : z.labels) {
    if (l < 0 || l >= z.blocks) throw std::invalid_argument("block assignment: label out of range");
  }
}

double block_loss(const Matrix& m, const Matrix& q, const BlockAssignment& z) {
  validate(z);
  if (m.rows() != z.n() || m.cols() != z.n()) {
    throw std::invalid_argument("block_loss: matrix and labels disagree in size");
  }
  if (q.rows() < z.blocks || q.cols() < z.blocks) {
    throw std::invalid_argument("block_loss: q smaller than the label range");
  }
  double loss = 0.0;
  const int n = z.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = m(i, j) - q(z.labels[static_cast<std::size_t>(i)],
                                   z.labels[static_cast<std::size_t>(j)]);
      loss += d * d;
    }
  }
  return loss;
}

Matrix optimal_block_means(const Matrix& m, const BlockAssignment& z) {
  validate(z);
  Matrix sums = Matrix::Zero(z.blocks, z.blocks);
  Matrix counts = Matrix::Zero(z.blocks, z.blocks);
  const int n = z.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const int a = z.labels[static_cast<std::size_t>(i)];
      const int b = z.labels[static_cast<std::size_t>(j)];
      sums(a, b) += m(i, j);
      counts(a, b) += 1.0;
    }
  }
  Matrix q = Matrix::Zero(z.blocks, z.blocks);
  for (int b = 0; b < z.blocks; ++b)
    for (int a = 0; a < z.blocks; ++a)
      if (counts(a, b) > 0.0) q(a, b) = sums(a, b) / counts(a, b);
  return 0.5 * (q + q.transpose());
}

NpStrategy NpStrategy::parse(const std::string& s) {
  if (s == "exhaustive") return exhaustive();
  if (s.rfind("alt:", 0) == 0) {
    const auto comma = s.find(',', 4);
    if (comma != std::string::npos) {
      try {
        return alternating(std::stoi(s.substr(4, comma - 4)), std::stoi(s.substr(comma + 1)));
      } catch (const std::exception&) {
      }
    }
  }
  throw std::invalid_argument("unknown NP strategy '" + s + "' (use exhaustive or alt:R,I)");
}

std::string NpStrategy::describe() const {
  if (kind == Kind::exhaustive) return "exhaustive";
  return "alt:" + std::to_string(restarts) + "," + std::to_string(max_iters);
}

BlockFit np_fit(const Matrix& m, int r0, const NpStrategy& strategy) {
  check_input(m, r0);
  if (strategy.kind == NpStrategy::Kind::exhaustive) return fit_exhaustive(m, r0);
  return fit_alternating(m, r0, strategy);
}

Denoiser np_denoiser(int r0, NpStrategy strategy) {
  return [r0, strategy](const CusumMatrix& bhat, const Thresholds&) {
    return np_fit(bhat.entries, r0, strategy).fitted;
  };
}

DetectionOutcome np_run(SnapshotSource& source, const DetectorConfig& cfg, int r0,
                        const NpStrategy& strategy) {
  return run(source, cfg, np_denoiser(r0, strategy));
}

}  // namespace netcpd
