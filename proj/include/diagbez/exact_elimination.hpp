#pragma once

// Exact rank, reduced row echelon form and left null space of small integer
// matrices. Elimination is fraction-free on big integers; each row is kept
// primitive (content divided out) so entries stay small.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <vector>

namespace diagbez {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Dense row-major matrix over an exact ring.
template <typename T>
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactMatrix transposed() const {
    ExactMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = ExactMatrix<BigInt>;
using RationalMatrix = ExactMatrix<Rational>;

/// Result of reducing A: `reduced` = `transform` * A is in reduced row echelon
/// form with unit pivots. Rows rank..m-1 of `transform` span the left null
/// space of A.
struct EchelonForm {
  RationalMatrix reduced;
  RationalMatrix transform;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;

  std::vector<std::size_t> free_cols() const {
    std::vector<std::size_t> out;
    std::size_t p = 0;
    for (std::size_t c = 0; c < reduced.cols(); ++c) {
      if (p < pivot_cols.size() && pivot_cols[p] == c)
        ++p;
      else
        out.push_back(c);
    }
    return out;
  }
};

namespace detail {

inline void make_primitive(IntMatrix& m, std::size_t row) {
  BigInt g = 0;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (m(row, c) != 0) g = boost::multiprecision::gcd(g, BigInt(abs(m(row, c))));
  if (g > 1)
    for (std::size_t c = 0; c < m.cols(); ++c) m(row, c) /= g;
}

}  // namespace detail

/// Gauss-Jordan reduction scanning columns left to right; the pivot of each
/// column is the first remaining row (in row order) with a nonzero entry.
inline EchelonForm reduce(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  // Work on [A | I] so the row transform comes out alongside.
  IntMatrix w(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) w(r, c) = a(r, c);
    w(r, n + r) = 1;
  }

  EchelonForm out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && w(piv, col) == 0) ++piv;
    if (piv == m) continue;
    if (piv != row)
      for (std::size_t c = 0; c < n + m; ++c) std::swap(w(row, c), w(piv, c));
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || w(r, col) == 0) continue;
      const BigInt f = w(r, col);
      const BigInt p = w(row, col);
      for (std::size_t c = 0; c < n + m; ++c) w(r, c) = p * w(r, c) - f * w(row, c);
      detail::make_primitive(w, r);
    }
    out.pivot_cols.push_back(col);
    ++row;
  }
  out.rank = row;

  out.reduced = RationalMatrix(m, n);
  out.transform = RationalMatrix(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    // Pivot rows are scaled to a unit pivot; null rows keep their integers.
    const Rational scale = r < out.rank ? Rational(1) / Rational(w(r, out.pivot_cols[r])) : Rational(1);
    for (std::size_t c = 0; c < n; ++c) out.reduced(r, c) = scale * w(r, c);
    for (std::size_t c = 0; c < m; ++c) out.transform(r, c) = scale * w(r, n + c);
  }
  return out;
}

inline std::size_t rank(const IntMatrix& a) { return reduce(a).rank; }

}  // namespace diagbez
