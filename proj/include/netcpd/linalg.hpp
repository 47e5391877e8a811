#pragma once

#include <Eigen/Dense>

namespace netcpd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenpairs of a real symmetric matrix, ordered by descending |eigenvalue|.
/// Column i of `eigenvectors` pairs with `eigenvalues[i]`.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

// Largest |m - m^T| entry.
double asymmetry(const Matrix& m);

/// Full symmetric eigendecomposition (Householder tridiagonalisation followed
/// by implicit QR). Throws std::invalid_argument when `m` is not square or not
/// symmetric within 1e-12 (relative to its largest entry), std::runtime_error
/// when the iteration fails to converge.
EigenDecomposition eigh(const Matrix& m);

/// Cyclic Jacobi eigensolver. Converges once the off-diagonal Frobenius mass
/// drops below 1e-12 * ||m||_F; throws std::runtime_error after `max_sweeps`.
/// Much slower than eigh() but entirely self-contained; used as a reference.
EigenDecomposition eigh_jacobi(const Matrix& m, int max_sweeps = 100);

/// Number of |eigenvalues| above rel_tol * max |eigenvalue| of a symmetric matrix.
int numerical_rank(const Matrix& m, double rel_tol = 1e-10);

}  // namespace netcpd
