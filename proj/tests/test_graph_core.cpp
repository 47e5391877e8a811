#include <doctest.h>

#include <cmath>
#include <random>

#include "netcpd/graph_core.hpp"
#include "oracles.hpp"

using namespace netcpd;

namespace {

Matrix two_level(int n, const std::vector<int>& z, double within, double between,
                 bool zero_diag) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = z[i] == z[j] ? within : between;
  if (zero_diag) m.diagonal().setZero();
  return m;
}

std::vector<int> equal_blocks(int n, int k) {
  std::vector<int> z(n);
  for (int i = 0; i < n; ++i) z[i] = i / (n / k);
  return z;
}

}  // namespace

TEST_CASE("snapshot validation") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = 1;
  CHECK_NOTHROW(make_snapshot(a, 1));
  CHECK_THROWS_AS(make_snapshot(a, 0), std::invalid_argument);
  Matrix asym = a;
  asym(1, 0) = 0;
  CHECK_THROWS_AS(make_snapshot(asym, 1), std::invalid_argument);
  Matrix diag = a;
  diag(2, 2) = 1;
  CHECK_THROWS_AS(make_snapshot(diag, 1), std::invalid_argument);
  Matrix half = a;
  half(0, 1) = half(1, 0) = 0.5;
  CHECK_THROWS_AS(make_snapshot(half, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_graphon(Matrix::Constant(2, 2, 1.5)), std::invalid_argument);
}

TEST_CASE("append builds prefix sums") {
  std::mt19937_64 rng(7);
  CusumState st(6);
  CHECK(st.prefix(0).isZero());
  const Matrix a1 = oracle::random_adjacency(6, 0.4, rng);
  st.append(make_snapshot(a1, 1));
  CHECK(st.t() == 1);
  CHECK(st.prefix(1) == a1);

  CusumState twice(6);
  twice.append(make_snapshot(a1, 1));
  twice.append(make_snapshot(a1, 2));
  CHECK(twice.prefix(2) == 2.0 * a1);

  CusumState ten(6);
  Matrix total = Matrix::Zero(6, 6);
  for (int t = 1; t <= 10; ++t) {
    const Matrix a = oracle::random_adjacency(6, 0.5, rng);
    total += a;
    ten.append(make_snapshot(a, t));
  }
  CHECK(ten.prefix(10) == total);
}

TEST_CASE("append rejects bad input") {
  CusumState st(4);
  CHECK_THROWS_AS(st.append(make_snapshot(Matrix::Zero(3, 3), 1)), std::invalid_argument);
  CHECK_THROWS_AS(st.append(make_snapshot(Matrix::Zero(4, 4), 2)), std::invalid_argument);
  st.append(make_snapshot(Matrix::Zero(4, 4), 1));
  CHECK_THROWS_AS(st.append(make_snapshot(Matrix::Zero(4, 4), 1)), std::invalid_argument);
}

TEST_CASE("cusum examples") {
  std::mt19937_64 rng(11);
  const Matrix a = oracle::random_adjacency(5, 0.5, rng);
  CusumState constant(5);
  for (int t = 1; t <= 6; ++t) constant.append(make_snapshot(a, t));
  for (int t = 2; t <= 6; ++t)
    for (int s = 1; s < t; ++s) CHECK(constant.cusum(s, t).entries.cwiseAbs().maxCoeff() < 1e-12);

  std::vector<Matrix> seq;
  CusumState st(5);
  for (int t = 1; t <= 5; ++t) {
    seq.push_back(oracle::random_adjacency(5, 0.5, rng));
    st.append(make_snapshot(seq.back(), t));
  }
  const Matrix c12 = st.cusum(1, 2).entries;
  CHECK((c12 - (seq[0] - seq[1]) / std::sqrt(2.0)).cwiseAbs().maxCoeff() < 1e-15);
  const Matrix c25 = st.cusum(2, 5).entries;
  CHECK((c25 - oracle::cusum(seq, 2, 5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(c25 == c25.transpose());

  CHECK_THROWS(st.cusum(3, 3));
  CHECK_THROWS(st.cusum(0, 2));
  CHECK_THROWS(st.cusum(2, 6));
}

TEST_CASE("cusum weights have unit square mass") {
  for (int t = 2; t <= 40; ++t) {
    for (int s = 1; s < t; ++s) {
      const auto [before, after] = cusum_weights(s, t);
      CHECK(before * before * s + after * after * (t - s) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(before * s - after * (t - s) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("windowed state matches full state on the grid") {
  std::mt19937_64 rng(5);
  CusumState full(5), win(5, true);
  for (int t = 1; t <= 70; ++t) {
    const Matrix a = oracle::random_adjacency(5, 0.3, rng);
    full.append(make_snapshot(a, t));
    win.append(make_snapshot(a, t));
    if (t < 2) continue;
    for (int s : geometric_grid(t)) CHECK(win.cusum(s, t).entries == full.cusum(s, t).entries);
  }
  CHECK(win.oldest_prefix() > 0);
  CHECK_THROWS_AS(win.prefix(0), std::out_of_range);
}

TEST_CASE("geometric grid") {
  CHECK(geometric_grid(2) == std::vector<int>{1});
  CHECK(geometric_grid(3) == std::vector<int>{2});
  CHECK(geometric_grid(8) == std::vector<int>{7, 6, 4});
  CHECK_THROWS_AS(geometric_grid(1), std::invalid_argument);
  for (int t = 2; t < 3000; ++t) {
    const auto g = geometric_grid(t);
    CHECK(static_cast<int>(g.size()) == static_cast<int>(std::floor(std::log2(t))));
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(g[k] >= 1);
      CHECK(g[k] < t);
      if (k > 0) CHECK(g[k] < g[k - 1]);
    }
  }
}

TEST_CASE("expected cusum branches") {
  Matrix before = Matrix::Constant(4, 4, 0.3);
  Matrix after = Matrix::Constant(4, 4, 0.7);
  before.diagonal().setZero();
  after.diagonal().setZero();
  const ChangeScenario sc = make_change_scenario(make_graphon(before), make_graphon(after), 10);
  const Matrix diff = before - after;

  CHECK(expected_cusum(sc, 3, 10).isZero());
  CHECK(expected_cusum(sc, 9, 10).isZero());

  for (int h : {1, 2, 4, 8}) {
    const Matrix e = expected_cusum(sc, 10, 10 + h);
    const Matrix want = h * std::sqrt(10.0 / ((10.0 + h) * h)) * diff;
    CHECK((e - want).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(e.norm() == doctest::Approx(sc.kappa * std::sqrt(10.0 * h / (10.0 + h))).epsilon(1e-12));
  }
  // Later split point: only the first delta snapshots differ.
  const Matrix late = expected_cusum(sc, 15, 20);
  CHECK((late - 10.0 * std::sqrt(5.0 / (15.0 * 20.0)) * diff).cwiseAbs().maxCoeff() < 1e-14);

  // The two branch formulas agree at s = delta.
  const double t = 17, s = 10, d = 10;
  CHECK((t - d) * std::sqrt(s / (t * (t - s))) ==
        doctest::Approx(d * std::sqrt((t - s) / (s * t))).epsilon(1e-14));

  const ChangeScenario none = make_change_scenario(make_graphon(before), make_graphon(after), std::nullopt);
  CHECK(expected_cusum(none, 3, 50).isZero());
  CHECK_THROWS(expected_cusum(sc, 5, 5));
}

TEST_CASE("expected cusum matches a Monte Carlo mean") {
  const int n = 5, delta = 6, s = 4, t = 12, reps = 2000;
  Matrix before = Matrix::Constant(n, n, 0.2);
  Matrix after = Matrix::Constant(n, n, 0.2);
  after.topLeftCorner(3, 3).setConstant(0.6);
  before.diagonal().setZero();
  after.diagonal().setZero();
  const ChangeScenario sc = make_change_scenario(make_graphon(before), make_graphon(after), delta);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix sum = Matrix::Zero(n, n);
  for (int r = 0; r < reps; ++r) {
    CusumState st(n);
    for (int l = 1; l <= t; ++l) {
      const Matrix& p = l <= delta ? before : after;
      Matrix a = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (u(rng) < p(i, j)) a(i, j) = a(j, i) = 1;
      st.append(make_snapshot(a, l));
    }
    sum += st.cusum(s, t).entries;
  }
  const Matrix mean = sum / reps;
  const Matrix expect = expected_cusum(sc, s, t);
  const auto [wb, wa] = cusum_weights(s, t);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double var = 0;
      for (int l = 1; l <= t; ++l) {
        const double p = (l <= delta ? before : after)(i, j);
        const double w = l <= s ? wb : wa;
        var += w * w * p * (1 - p);
      }
      CHECK(std::abs(mean(i, j) - expect(i, j)) <= 3.0 * std::sqrt(var / reps));
    }
  }
}

TEST_CASE("jump size worked cases") {
  const int n = 36;
  const double p1 = 0.7, p2 = 0.25, dp = std::abs(p1 - p2);

  SUBCASE("probability change inside a half-size block") {
    for (bool zero_diag : {false, true}) {
      Matrix before = Matrix::Constant(n, n, p2);
      Matrix after = before;
      before.topLeftCorner(n / 2, n / 2).setConstant(p1);
      if (zero_diag) {
        before.diagonal().setZero();
        after.diagonal().setZero();
      }
      const JumpSize j = jump_size(make_graphon(before), make_graphon(after));
      // The half block has (n/2)^2 cells, n/2 of them diagonal.
      const double cells = zero_diag ? (n / 2.0) * (n / 2.0) - n / 2.0 : (n / 2.0) * (n / 2.0);
      CHECK(j.kappa == doctest::Approx(std::sqrt(cells) * dp).epsilon(1e-12));
      if (!zero_diag) CHECK(std::abs(j.kappa - n * dp / 2.0) < 1e-10);
    }
  }

  SUBCASE("two balanced communities become three") {
    const auto z2 = equal_blocks(n, 2);
    const auto z3 = equal_blocks(n, 3);
    // Within/between roles exchanged in the three-community graphon: changed
    // cells are those where the two partitions agree, a 26/36 share.
    for (bool zero_diag : {false, true}) {
      const Matrix before = two_level(n, z2, p1, p2, zero_diag);
      const Matrix after = two_level(n, z3, p2, p1, zero_diag);
      const JumpSize j = jump_size(make_graphon(before), make_graphon(after));
      const double sq = 13.0 / 18.0 * n * n - (zero_diag ? n : 0);
      CHECK(std::abs(j.kappa - std::sqrt(sq) * dp) < 1e-10);
      if (!zero_diag) CHECK(std::abs(j.kappa - std::sqrt(13.0 / 18.0) * n * dp) < 1e-10);
    }
    // Roles kept: only disagreeing cells change, a 10/36 share; the diagonal
    // never disagrees, so zeroing it changes nothing.
    for (bool zero_diag : {false, true}) {
      const JumpSize j = jump_size(make_graphon(two_level(n, z2, p1, p2, zero_diag)),
                                   make_graphon(two_level(n, z3, p1, p2, zero_diag)));
      CHECK(std::abs(j.kappa - std::sqrt(5.0 / 18.0) * n * dp) < 1e-10);
    }
  }

  SUBCASE("no change") {
    const Matrix m = two_level(n, equal_blocks(n, 2), p1, p2, true);
    const JumpSize j = jump_size(make_graphon(m), make_graphon(m));
    CHECK(j.kappa == 0.0);
    CHECK(j.kappa0 == 0.0);
    CHECK(j.rank == 0);
  }
}

TEST_CASE("jump size normalisation and rank") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a(8, 8), b(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j) {
        a(i, j) = a(j, i) = u(rng);
        b(i, j) = b(j, i) = u(rng);
      }
    const JumpSize js = jump_size(make_graphon(a), make_graphon(b));
    const double rho = std::max(a.maxCoeff(), b.maxCoeff());
    CHECK(std::abs(js.kappa - (a - b).norm()) < 1e-10);
    CHECK(std::abs(js.kappa0 - js.kappa / (8 * rho)) < 1e-10);
    CHECK(js.kappa0 > 0.0);
    CHECK(js.kappa0 <= 1.0);
    CHECK(js.rank == 8);
  }
  const Matrix z = Matrix::Zero(3, 3);
  Matrix one = z;
  one(0, 1) = one(1, 0) = 0.5;
  CHECK_THROWS_AS(jump_size(make_graphon(z), make_graphon(one), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(jump_size(make_graphon(z), make_graphon(Matrix::Zero(4, 4))), std::invalid_argument);
}
