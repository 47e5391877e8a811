#pragma once

// Independent reference implementations used only by the tests. They follow
// the definitions directly and share no code paths with the library beyond
// the Matrix type and the Jacobi eigensolver.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "netcpd/graph_core.hpp"
#include "netcpd/harness.hpp"
#include "netcpd/linalg.hpp"

namespace oracle {

using netcpd::Matrix;

inline Matrix random_adjacency(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge(rng)) a(i, j) = a(j, i) = 1.0;
  return a;
}

inline Matrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = g(rng);
  return m;
}

// CUSUM at (s, t) as an explicit weighted sum over the sequence a[0..t-1].
inline Matrix cusum(const std::vector<Matrix>& a, int s, int t) {
  Matrix out = Matrix::Zero(a[0].rows(), a[0].cols());
  for (int l = 1; l <= t; ++l) {
    const double w = l <= s ? std::sqrt(double(t - s) / (double(s) * t))
                            : -std::sqrt(double(s) / (double(t - s) * t));
    out += w * a[static_cast<std::size_t>(l - 1)];
  }
  return out;
}

// Reconstruct from the Jacobi decomposition, keep |lambda| >= tau1, clip.
inline Matrix usvt(const Matrix& m, double tau1, double tau2) {
  const auto eig = netcpd::eigh_jacobi(m);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (std::abs(eig.eigenvalues[k]) >= tau1) {
      out += eig.eigenvalues[k] * eig.eigenvectors.col(k) * eig.eigenvectors.col(k).transpose();
    }
  }
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) = std::max(-tau2, std::min(tau2, out(i, j)));
  return out;
}

inline double block_loss(const Matrix& m, const Matrix& q, const std::vector<int>& z) {
  double loss = 0.0;
  const int n = static_cast<int>(z.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) loss += std::pow(m(i, j) - q(z[i], z[j]), 2);
  return loss;
}

// Minimum over every labelling in {0..r0-1}^n of the loss at block means.
inline double brute_force_np_loss(const Matrix& m, int r0) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  double best = INFINITY;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      Matrix sum = Matrix::Zero(r0, r0), cnt = Matrix::Zero(r0, r0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (a != b) {
            sum(z[a], z[b]) += m(a, b);
            cnt(z[a], z[b]) += 1;
          }
      Matrix q = Matrix::Zero(r0, r0);
      for (int a = 0; a < r0; ++a)
        for (int b = 0; b < r0; ++b)
          if (cnt(a, b) > 0) q(a, b) = sum(a, b) / cnt(a, b);
      best = std::min(best, block_loss(m, q, z));
      return;
    }
    for (int l = 0; l < r0; ++l) {
      z[static_cast<std::size_t>(i)] = l;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

struct DelayPfa {
  std::optional<double> delay;
  double pfa;
};

inline DelayPfa metrics(const std::vector<netcpd::ReplicateRecord>& recs, int delta, int horizon) {
  double num = 0, den = 0, early = 0;
  for (const auto& r : recs) {
    const int tt = r.t_raw ? std::min(horizon, *r.t_raw) : horizon;
    if (tt >= delta) {
      num += tt - delta;
      den += 1;
    } else {
      early += 1;
    }
  }
  DelayPfa out{std::nullopt, early / static_cast<double>(recs.size())};
  if (den > 0) out.delay = num / den;
  return out;
}

// Quantile by sorting and indexing at ceil(q m) - 1.
inline double sorted_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  std::size_t k = static_cast<std::size_t>(std::ceil(q * v.size()));
  return v[k == 0 ? 0 : k - 1];
}

}  // namespace oracle
