#pragma once

// Bernstein/Bezier primitives: exact binomials, basis values, curve and
// tensor-product surface evaluation, degree elevation.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diagbez/errors.hpp"

namespace diagbez {

/// A point of model space. The dimension is a runtime property; every point
/// of one net, polygon or system shares it.
using Point = Eigen::VectorXd;

inline Point zero_point(Eigen::Index dim) { return Point::Zero(dim); }

inline bool is_finite(const Point& p) { return p.allFinite(); }

/// Exact binomial coefficient C(n, k); 0 when k lies outside [0, n].
/// Throws ErrorCode::Capacity when the value does not fit in 64 bits.
inline std::uint64_t binomial(int n, int k) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "binomial: negative n");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    // acc * (n-k+i) / i is exact at every step since acc == C(n-k+i-1, i-1).
    acc = acc * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max())
      throw Error(ErrorCode::Capacity,
                  "binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") overflows 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

inline double bernstein(int degree, int i, double t) {
  if (degree < 0 || i < 0 || i > degree)
    throw Error(ErrorCode::InvalidArgument, "bernstein: index out of range");
  return static_cast<double>(binomial(degree, i)) * std::pow(t, i) * std::pow(1.0 - t, degree - i);
}

namespace detail {

inline void require_unit(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0))
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": parameter outside [0,1]");
}

inline void require_same_dim(std::span<const Point> pts, const char* what) {
  if (pts.empty()) return;
  const auto d = pts.front().size();
  if (d < 1) throw Error(ErrorCode::Shape, std::string(what) + ": zero-dimensional point");
  for (const auto& p : pts)
    if (p.size() != d) throw Error(ErrorCode::Shape, std::string(what) + ": mixed point dimensions");
}

// In-place de Casteljau on a scratch copy.
inline Point de_casteljau(std::vector<Point> work, double t) {
  for (std::size_t level = work.size(); level > 1; --level)
    for (std::size_t i = 0; i + 1 < level; ++i) work[i] = (1.0 - t) * work[i] + t * work[i + 1];
  return work.front();
}

}  // namespace detail

/// Control polygon of a Bezier curve; degree is points.size() - 1.
class CurvePolygon {
 public:
  CurvePolygon() = default;
  explicit CurvePolygon(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(ErrorCode::Shape, "curve polygon needs at least one point");
    detail::require_same_dim(points_, "curve polygon");
  }

  int degree() const { return static_cast<int>(points_.size()) - 1; }
  Eigen::Index dim() const { return points_.empty() ? 0 : points_.front().size(); }

  const Point& operator[](std::size_t i) const { return points_[i]; }
  Point& operator[](std::size_t i) { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }

  friend bool operator==(const CurvePolygon& a, const CurvePolygon& b) {
    if (a.points_.size() != b.points_.size()) return false;
    for (std::size_t i = 0; i < a.points_.size(); ++i)
      if (a.points_[i].size() != b.points_[i].size() || a.points_[i] != b.points_[i]) return false;
    return true;
  }

 private:
  std::vector<Point> points_;
};

/// (n+1)x(n+1) control net of a degree n x n tensor-product patch, stored
/// row-major by the first index i.
class ControlNet {
 public:
  ControlNet() = default;

  ControlNet(int degree, Eigen::Index dim) : degree_(degree) {
    if (degree < 1) throw Error(ErrorCode::Shape, "control net degree must be positive");
    if (dim < 1) throw Error(ErrorCode::Shape, "control net dimension must be positive");
    points_.assign(static_cast<std::size_t>((degree + 1) * (degree + 1)), zero_point(dim));
  }

  ControlNet(int degree, std::vector<Point> row_major) : degree_(degree), points_(std::move(row_major)) {
    if (degree < 1) throw Error(ErrorCode::Shape, "control net degree must be positive");
    if (points_.size() != static_cast<std::size_t>((degree + 1) * (degree + 1)))
      throw Error(ErrorCode::Shape, "control net must hold (n+1)^2 points");
    detail::require_same_dim(points_, "control net");
  }

  int degree() const { return degree_; }
  Eigen::Index dim() const { return points_.empty() ? 0 : points_.front().size(); }

  const Point& operator()(int i, int j) const { return points_[index(i, j)]; }
  Point& operator()(int i, int j) { return points_[index(i, j)]; }

  const std::vector<Point>& points() const { return points_; }

  friend bool operator==(const ControlNet& a, const ControlNet& b) {
    if (a.degree_ != b.degree_ || a.points_.size() != b.points_.size()) return false;
    for (std::size_t i = 0; i < a.points_.size(); ++i)
      if (a.points_[i].size() != b.points_[i].size() || a.points_[i] != b.points_[i]) return false;
    return true;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i * (degree_ + 1) + j);
  }

  int degree_ = 0;
  std::vector<Point> points_;
};

inline Point eval_curve(const CurvePolygon& poly, double t) {
  detail::require_unit(t, "eval_curve");
  return detail::de_casteljau(poly.points(), t);
}

/// Evaluates x(u,v) by de Casteljau along each row (v) and then across the
/// resulting column (u).
inline Point eval_surface(const ControlNet& net, double u, double v) {
  detail::require_unit(u, "eval_surface");
  detail::require_unit(v, "eval_surface");
  const int n = net.degree();
  std::vector<Point> column;
  column.reserve(static_cast<std::size_t>(n + 1));
  std::vector<Point> row(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) row[static_cast<std::size_t>(j)] = net(i, j);
    column.push_back(detail::de_casteljau(row, v));
  }
  return detail::de_casteljau(std::move(column), u);
}

/// Raises the degree by one without changing the curve.
inline CurvePolygon degree_elevate(const CurvePolygon& poly) {
  const int m = poly.degree();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(m + 2));
  out.push_back(poly[0]);
  for (int i = 1; i <= m; ++i) {
    const double a = static_cast<double>(i) / (m + 1);
    out.push_back(a * poly[static_cast<std::size_t>(i - 1)] + (1.0 - a) * poly[static_cast<std::size_t>(i)]);
  }
  out.push_back(poly[static_cast<std::size_t>(m)]);
  return CurvePolygon(std::move(out));
}

/// Length of the bounding-box diagonal of a point set (0 for an empty set).
inline double bbox_diagonal(std::span<const Point> pts) {
  if (pts.empty()) return 0.0;
  Point lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

}  // namespace diagbez
