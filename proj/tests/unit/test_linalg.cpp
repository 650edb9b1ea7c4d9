#include <cmath>
#include <random>

#include "convert.hpp"
#include "doctest.h"
#include "oa3/errors.hpp"
#include "oa3/linalg.hpp"
#include "oracles.hpp"

using namespace oa3;
using testutil::from_oracle;
using testutil::to_oracle;

TEST_CASE("SparseVector rejects non-canonical input") {
  CHECK_THROWS_AS(SparseVector(3, {{1, 1.0}, {1, 2.0}}), DimensionError);
  CHECK_THROWS_AS(SparseVector(3, {{2, 1.0}, {0, 2.0}}), DimensionError);
  CHECK_THROWS_AS(SparseVector(3, {{3, 1.0}}), DimensionError);
  CHECK_THROWS_AS(SparseVector(3, {{0, 0.0}}), DimensionError);

  const auto v = SparseVector::from_unsorted(4, {{3, 1.0}, {0, 2.0}, {1, 0.0}});
  REQUIRE(v.nnz() == 2);
  CHECK(v.entries()[0].index == 0);
  CHECK(v.entries()[1].index == 3);
}

TEST_CASE("dot") {
  const SparseVector a(4, {{1, 2.0}, {3, 1.0}});
  CHECK(dot(a, DenseVector{0, 1, 0, 4}) == 6.0);
  CHECK(dot(SparseVector(4), DenseVector{1, 2, 3, 4}) == 0.0);
  CHECK(dot(SparseVector(2, {{0, 1.0}}), DenseVector{1, 0}) == 1.0);
  CHECK_THROWS_AS(dot(a, DenseVector{1, 2}), DimensionError);
}

TEST_CASE("quad_form") {
  CHECK(quad_form(SparseVector(2, {{0, 1.0}}), DenseMatrix::identity(2)) == 1.0);
  const DenseMatrix m{{1, 2}, {2, 1}};
  // Dense expansion: [1 1]·[[1,2],[2,1]]·[1 1]ᵀ
  const double expected = oracle::quad({1, 1}, to_oracle(m));
  CHECK(expected == 6.0);
  CHECK(quad_form(SparseVector(2, {{0, 1.0}, {1, 1.0}}), m) == expected);
  CHECK(quad_form(SparseVector(2), m) == 0.0);
  CHECK_THROWS_AS(quad_form(SparseVector(3), m), DimensionError);
}

TEST_CASE("quad_form matches the dense oracle on random inputs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 15;
    const auto m = oracle::random_spd(d, rng);
    const auto x = testutil::random_sparse(d, 0.6, 1.0, rng);
    const double ref = oracle::quad(x.to_dense(), m);
    const double got = quad_form(x, from_oracle(m));
    CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("rank_one_downdate examples") {
  // Oracle: invert I + xxᵀ/γ directly.
  const SparseVector e0(2, {{0, 1.0}});
  const auto ref1 = oracle::inverse({{2, 0}, {0, 1}});
  const auto got1 = rank_one_downdate(DenseMatrix::identity(2), e0, 1.0);
  CHECK(max_abs_diff(got1, from_oracle(ref1)) <= 1e-15);
  CHECK(got1(0, 0) == 0.5);

  CHECK(rank_one_downdate(DenseMatrix::identity(2), SparseVector(2), 1.0) ==
        DenseMatrix::identity(2));

  // diag(2,2), x = e1, γ = 2 → inverse of diag(1/2, 1/2 + 1/2) = diag(2, 1)
  const auto ref3 = oracle::inverse({{0.5, 0}, {0, 1.0}});
  const auto got3 = rank_one_downdate(DenseMatrix::diagonal(DenseVector{2, 2}),
                                      SparseVector(2, {{1, 1.0}}), 2.0);
  CHECK(max_abs_diff(got3, from_oracle(ref3)) <= 1e-15);
  CHECK(got3(1, 1) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(rank_one_downdate(DenseMatrix::identity(3), e0, 1.0), DimensionError);
}

TEST_CASE("rank_one_downdate inverts M⁻¹ + xxᵀ/γ (property)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (double gamma : {0.1, 1.0, 10.0}) {
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t d = 1 + trial % 20;
      const auto m = oracle::random_spd(d, rng);
      const auto x = testutil::random_sparse(d, 0.5, unit(rng), rng);
      const auto out = to_oracle(rank_one_downdate(from_oracle(m), x, gamma));

      auto target = oracle::inverse(m);
      const auto xd = x.to_dense();
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) target[i][j] += xd[i] * xd[j] / gamma;
      CHECK(oracle::max_abs_minus_identity(oracle::multiply(out, target)) <= 1e-8);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) CHECK(out[i][j] == out[j][i]);
    }
  }
}

TEST_CASE("orthonormalize_rows examples") {
  auto r1 = orthonormalize_rows(DenseMatrix{{2, 0}, {0, 3}});
  CHECK(r1.degenerate_count == 0);
  CHECK(r1.rows == DenseMatrix::identity(2));

  // Hand Gram–Schmidt: [1,1]/√2, then [1,0] − ½[1,1] = [½,−½] → [1,−1]/√2
  auto r2 = orthonormalize_rows(DenseMatrix{{1, 1}, {1, 0}});
  const double h = std::sqrt(0.5);
  CHECK(r2.degenerate_count == 0);
  CHECK(max_abs_diff(r2.rows, DenseMatrix{{h, h}, {h, -h}}) <= 1e-15);

  auto r3 = orthonormalize_rows(DenseMatrix{{1, 0}, {1, 0}}, 1e-10);
  CHECK(r3.degenerate_count == 1);
  CHECK(max_abs_diff(r3.rows * r3.rows.transpose(), DenseMatrix::identity(2)) <= 1e-15);
}

TEST_CASE("orthonormalize_rows uses the fallback row on degeneracy") {
  const DenseMatrix prev{{1, 0, 0}, {0, 0, 1}};
  auto r = orthonormalize_rows(DenseMatrix{{1, 0, 0}, {2, 0, 0}}, 1e-10, &prev);
  CHECK(r.degenerate_count == 1);
  CHECK(r.rows == prev);
}

TEST_CASE("orthonormalize_rows output is orthonormal and spans the same flag") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 5, d = m + trial % 30;
    DenseMatrix v(m, d);
    for (std::size_t i = 0; i < m; ++i)
      for (auto& x : v.row(i)) x = nd(rng);
    const auto out = orthonormalize_rows(v);
    REQUIRE(out.degenerate_count == 0);
    CHECK(max_abs_diff(out.rows * out.rows.transpose(), DenseMatrix::identity(m)) <= 1e-10);
    const auto ref = oracle::gram_schmidt(to_oracle(v), oracle::identity(d));
    CHECK(max_abs_diff(out.rows, from_oracle(ref)) <= 1e-9);
  }
}

TEST_CASE("solve_small") {
  const DenseVector b{3, 4};
  CHECK(solve_small(DenseMatrix::identity(2), b) == b);
  const auto y = solve_small(DenseMatrix{{2, 0}, {0, 4}}, DenseVector{2, 8});
  CHECK(y == DenseVector{1, 2});
  CHECK_THROWS_AS(solve_small(DenseMatrix{{1, 1}, {1, 1}}, b), SingularMatrixError);
  CHECK_THROWS_AS(solve_small(DenseMatrix(2, 2), b), SingularMatrixError);
}

TEST_CASE("solve_small residual on random well-conditioned systems") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto a = from_oracle(oracle::random_spd(n, rng));
    DenseVector b(n);
    for (auto& v : b) v = nd(rng);
    const auto y = solve_small(a, b);
    const auto ay = a * std::span<const double>(y);
    double bmax = 0.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    CHECK(max_abs_diff(ay, b) <= 1e-10 * bmax);
  }
}

TEST_CASE("kernels are deterministic") {
  std::mt19937_64 rng(3);
  const auto m = from_oracle(oracle::random_spd(12, rng));
  const auto x = testutil::random_sparse(12, 0.5, 1.0, rng);
  CHECK(rank_one_downdate(m, x, 0.7) == rank_one_downdate(m, x, 0.7));
  CHECK(orthonormalize_rows(m).rows == orthonormalize_rows(m).rows);
}
