#pragma once

#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "netcpd/linalg.hpp"

namespace netcpd {

/// One undirected network observed at a stream position: symmetric, binary,
/// zero diagonal. Use make_snapshot() to build one with validation.
struct AdjacencySnapshot {
  int time_index = 0;
  Matrix entries;

  int n() const { return static_cast<int>(entries.rows()); }
};

/// Throws std::invalid_argument unless `s` satisfies the snapshot invariants.
void validate(const AdjacencySnapshot& s);
AdjacencySnapshot make_snapshot(Matrix entries, int time_index);

/// Entrywise edge probabilities. Symmetric with entries in [0, 1].
struct GraphonMatrix {
  Matrix entries;

  int n() const { return static_cast<int>(entries.rows()); }
};

void validate(const GraphonMatrix& g);
GraphonMatrix make_graphon(Matrix entries);

/// Split-point / endpoint pair and the CUSUM matrix evaluated there.
struct CusumMatrix {
  int s = 0;
  int t = 0;
  Matrix entries;
};

/// Coefficients (before, after) multiplying the two partial sums of the CUSUM
/// statistic at (s, t). Their squares weight s and t - s terms summing to one.
std::pair<double, double> cusum_weights(int s, int t);

/// Cumulative sums S(u) = A(1) + ... + A(u) of an adjacency stream, so that the
/// CUSUM matrix at any (s, t) costs O(n^2).
///
/// In windowed mode prefixes with index below floor(t / 2) are dropped: the
/// geometric grid never asks for a split point that old. cusum() on a dropped
/// index throws.
class CusumState {
 public:
  explicit CusumState(int n, bool windowed = false);

  int n() const { return n_; }
  int t() const { return t_; }
  bool windowed() const { return windowed_; }
  int oldest_prefix() const { return first_kept_; }

  /// Requires a.n() == n() and a.time_index == t() + 1.
  void append(const AdjacencySnapshot& a);

  const Matrix& prefix(int u) const;
  CusumMatrix cusum(int s, int t) const;

  void reset();

 private:
  int n_;
  int t_ = 0;
  bool windowed_;
  int first_kept_ = 0;
  std::deque<Matrix> prefix_;
};

/// Candidate split points {t - 2^j : j = 0, ..., floor(log2 t) - 1}, strictly
/// decreasing. Throws std::invalid_argument for t < 2.
std::vector<int> geometric_grid(int t);

struct JumpSize {
  double kappa = 0.0;
  double kappa0 = 0.0;
  int rank = 0;
};

/// Frobenius jump, normalised jump kappa / (n rho) and numerical rank of the
/// difference. rho defaults to the largest entry over both graphons.
JumpSize jump_size(const GraphonMatrix& before, const GraphonMatrix& after,
                   std::optional<double> rho = std::nullopt);

/// Ground-truth description of a single-change stream. `delta` empty means
/// the pre-change law holds forever.
struct ChangeScenario {
  GraphonMatrix theta_before;
  GraphonMatrix theta_after;
  std::optional<int> delta;
  double rho = 0.0;
  double kappa = 0.0;
  double kappa0 = 0.0;
  int rank = 0;

  int n() const { return theta_before.n(); }
};

ChangeScenario make_change_scenario(GraphonMatrix before, GraphonMatrix after,
                                    std::optional<int> delta,
                                    std::optional<double> rho = std::nullopt);

/// Mean of the CUSUM matrix at (s, t) under a single change at `delta`.
Matrix expected_cusum(const ChangeScenario& scenario, int s, int t);

}  // namespace netcpd
