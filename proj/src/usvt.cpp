#include "netcpd/usvt.hpp"

#include <cmath>
#include <stdexcept>

namespace netcpd {

LowRankPart low_rank_part(const Matrix& m, double tau1) {
  if (!(tau1 >= 0.0)) throw std::invalid_argument("usvt: tau1 must be nonnegative");
  const Eigen::Index n = m.rows();
  if (m.size() == 0 || m.isZero(0.0)) return {Matrix::Zero(n, m.cols()), 0};

  const EigenDecomposition eig = eigh(m);
  // Eigenpairs arrive sorted by |lambda| descending, so the kept set is a prefix.
  Eigen::Index kept = 0;
  while (kept < n && std::abs(eig.eigenvalues[kept]) >= tau1) ++kept;
  if (kept == 0) return {Matrix::Zero(n, n), 0};

  const auto v = eig.eigenvectors.leftCols(kept);
  Matrix out = v * eig.eigenvalues.head(kept).asDiagonal() * v.transpose();
  // Restore exact symmetry lost to rounding in the product.
  out = 0.5 * (out + out.transpose()).eval();
  return {std::move(out), static_cast<int>(kept)};
}

Matrix usvt(const Matrix& m, const UsvtParams& p) {
  if (!(p.tau2 >= 0.0)) throw std::invalid_argument("usvt: tau2 must be nonnegative");
  Matrix out = low_rank_part(m, p.tau1).matrix;
  if (std::isfinite(p.tau2)) out = out.cwiseMax(-p.tau2).cwiseMin(p.tau2);
  return out;
}

}  // namespace netcpd
