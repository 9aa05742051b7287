#include <gtest/gtest.h>

#include <random>

#include "diagbez/exact_elimination.hpp"

namespace diagbez {
namespace {

IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

// transform * a == reduced, checked entry by entry in exact arithmetic.
void expect_consistent(const IntMatrix& a, const EchelonForm& e) {
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      Rational acc = 0;
      for (std::size_t k = 0; k < a.rows(); ++k) acc += e.transform(r, k) * Rational(a(k, c));
      ASSERT_EQ(acc, e.reduced(r, c)) << r << "," << c;
    }
}

TEST(Reduce, KnownRankAndPivots) {
  const auto a = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  const auto e = reduce(a);
  EXPECT_EQ(e.rank, 2u);
  EXPECT_EQ(e.pivot_cols, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(e.free_cols(), (std::vector<std::size_t>{2}));
  EXPECT_EQ(e.reduced(0, 0), 1);
  EXPECT_EQ(e.reduced(0, 2), 1);
  EXPECT_EQ(e.reduced(1, 1), 1);
  EXPECT_EQ(e.reduced(1, 2), 1);
  expect_consistent(a, e);
}

TEST(Reduce, LeftNullRowsVanish) {
  const auto a = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}, {3, 4, 7}});
  const auto e = reduce(a);
  ASSERT_EQ(e.rank, 2u);
  for (std::size_t r = e.rank; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_EQ(e.reduced(r, c), 0);
  expect_consistent(a, e);
}

TEST(Reduce, NegativePivotsAndZeroMatrix) {
  const auto a = from_rows({{0, -3}, {-2, 5}});
  const auto e = reduce(a);
  EXPECT_EQ(e.rank, 2u);
  EXPECT_EQ(e.reduced(0, 0), 1);
  EXPECT_EQ(e.reduced(0, 1), 0);
  EXPECT_EQ(e.reduced(1, 1), 1);
  expect_consistent(a, e);

  EXPECT_EQ(rank(IntMatrix(3, 4)), 0u);
}

TEST(Reduce, RandomMatricesAgreeWithProductRank) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 30; ++trial) {
    // rows x k times k x cols has rank <= k; with random entries it is k.
    const std::size_t rows = 7, cols = 6, k = 1 + static_cast<std::size_t>(trial % 5);
    IntMatrix left(rows, k), right(k, cols), prod(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < k; ++c) left(r, c) = coef(gen);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < cols; ++c) right(r, c) = coef(gen);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t t = 0; t < k; ++t) prod(r, c) += left(r, t) * right(t, c);
    const auto e = reduce(prod);
    EXPECT_LE(e.rank, k);
    EXPECT_EQ(e.rank, rank(prod.transposed()));
    expect_consistent(prod, e);
  }
}

TEST(Reduce, LargeBinomialEntriesStayExact) {
  // Hilbert-like integer matrix whose determinant is tiny relative to entries.
  IntMatrix a(6, 6);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c) {
      BigInt v = 1;
      for (std::size_t t = 0; t < r + c; ++t) v *= 7;
      a(r, c) = v + BigInt(r * c);
    }
  const auto e = reduce(a);
  expect_consistent(a, e);
  EXPECT_EQ(e.rank, rank(a.transposed()));
}

}  // namespace
}  // namespace diagbez
