#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netcpd/detector.hpp"

namespace netcpd {

/// Community labels z(i) in [0, blocks), one per node (0-based).
struct BlockAssignment {
  std::vector<int> labels;
  int blocks = 1;

  int n() const { return static_cast<int>(labels.size()); }
};

void validate(const BlockAssignment& z);

/// Least-squares block-model fit of a symmetric matrix.
struct BlockFit {
  Matrix q;            // blocks x blocks, symmetric
  BlockAssignment z;
  double loss = 0.0;   // block_loss(m, q, z)
  Matrix fitted;       // fitted(i, j) = q(z_i, z_j) off the diagonal, 0 on it
};

/// Sum over ordered pairs i != j of (m_ij - q_{z_i z_j})^2.
double block_loss(const Matrix& m, const Matrix& q, const BlockAssignment& z);

/// Loss-minimising q for fixed labels: each cell is the mean of m over the
/// block's off-diagonal cells, 0 for an empty cell set.
Matrix optimal_block_means(const Matrix& m, const BlockAssignment& z);

struct NpStrategy {
  enum class Kind { exhaustive, alternating };
  Kind kind = Kind::exhaustive;
  int restarts = 10;
  int max_iters = 100;
  std::uint64_t seed = 0;

  static NpStrategy exhaustive() { return {}; }
  static NpStrategy alternating(int restarts = 10, int max_iters = 100) {
    return {Kind::alternating, restarts, max_iters, 0};
  }
  /// "exhaustive" or "alt:<restarts>,<iters>".
  static NpStrategy parse(const std::string& s);
  std::string describe() const;
};

/// Upper bound on r0^n accepted by the exhaustive strategy.
inline constexpr double kExhaustiveLimit = 2e6;

/// Block-model least squares with r0 blocks.
///
/// The exhaustive strategy enumerates every labelling (global optimum, first
/// minimiser in enumeration order). The alternating strategy seeds labels from
/// the sign pattern of the leading eigenvectors (random labels on later
/// restarts), then alternates closed-form block means with greedy single-node
/// relabelling; the lowest-loss restart wins, ties to the lowest index.
BlockFit np_fit(const Matrix& m, int r0, const NpStrategy& strategy);

Denoiser np_denoiser(int r0, NpStrategy strategy);

/// Online detection with the block-model estimate in place of USVT.
DetectionOutcome np_run(SnapshotSource& source, const DetectorConfig& cfg, int r0,
                        const NpStrategy& strategy);

}  // namespace netcpd
