#include "netcpd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace netcpd {
namespace {

void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigh: matrix is not square");
  }
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  if (asymmetry(m) > 1e-12 * scale) {
    throw std::invalid_argument("eigh: matrix is not symmetric");
  }
}

// Reorders eigenpairs by |lambda| descending; ties go to the larger signed value.
EigenDecomposition sorted(const Vector& values, const Matrix& vectors) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double fa = std::abs(values[a]);
    const double fb = std::abs(values[b]);
    if (fa != fb) return fa > fb;
    return values[a] > values[b];
  });
  EigenDecomposition out{Vector(n), Matrix(vectors.rows(), n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = values[order[static_cast<std::size_t>(k)]];
    out.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace

double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

EigenDecomposition eigh(const Matrix& m) {
  require_symmetric(m);
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigensolver did not converge");
  }
  return sorted(solver.eigenvalues(), solver.eigenvectors());
}

EigenDecomposition eigh_jacobi(const Matrix& m, int max_sweeps) {
  require_symmetric(m);
  const Eigen::Index n = m.rows();
  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double tol = 1e-12 * m.norm();

  auto off_mass = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_mass() > tol) {
    if (sweep++ >= max_sweeps) {
      throw std::runtime_error("eigh_jacobi: no convergence within sweep limit");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle annihilating a(p,q), smaller root for stability.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return sorted(a.diagonal(), v);
}

int numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
  const Vector mags = solver.eigenvalues().cwiseAbs();
  const double top = mags.maxCoeff();
  if (top == 0.0) return 0;
  return static_cast<int>((mags.array() > rel_tol * top).count());
}

}  // namespace netcpd
