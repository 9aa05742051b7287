#pragma once

// Main diagonal curves of a tensor-product patch: extraction from a net,
// the weighted anti-diagonal sums D and E, admissibility of a prescribed
// pair, and repair of inadmissible pairs.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "diagbez/bezier.hpp"
#include "diagbez/errors.hpp"

namespace diagbez {

/// Relative tolerance used by admissibility and consistency checks; scaled by
/// the bounding-box diagonal of the involved points (floor 1).
inline constexpr double kDefaultTolerance = 1e-9;

/// Control polygons of x(t,t) (q) and x(t,1-t) (r) for a degree n x n patch.
struct DiagonalPair {
  int n = 0;
  CurvePolygon q;
  CurvePolygon r;

  DiagonalPair() = default;
  DiagonalPair(int degree, CurvePolygon first, CurvePolygon second)
      : n(degree), q(std::move(first)), r(std::move(second)) {
    if (n < 1) throw Error(ErrorCode::Shape, "diagonal pair: surface degree must be positive");
    if (q.degree() != 2 * n || r.degree() != 2 * n)
      throw Error(ErrorCode::Shape, "diagonal pair: polygons must have degree 2n = " + std::to_string(2 * n));
    if (q.dim() != r.dim()) throw Error(ErrorCode::Shape, "diagonal pair: mixed point dimensions");
  }

  Eigen::Index dim() const { return q.dim(); }

  std::vector<Point> all_points() const {
    std::vector<Point> pts = q.points();
    pts.insert(pts.end(), r.points().begin(), r.points().end());
    return pts;
  }
};

enum class Parity { Even, Odd };

inline constexpr std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

inline Parity parity_of(int n) { return n % 2 == 0 ? Parity::Even : Parity::Odd; }

struct CompatibilityReport {
  int n = 0;
  Parity parity = Parity::Even;
  Point residual_a;
  Point residual_b;
  double scale = 0.0;
  double tol = kDefaultTolerance;
  bool admissible = false;

  double max_residual() const { return std::max(residual_a.norm(), residual_b.norm()); }
};

namespace detail {

inline void require_diagonal_index(int n, int k) {
  if (k < 0 || k > 2 * n)
    throw Error(ErrorCode::InvalidArgument,
                "diagonal index " + std::to_string(k) + " outside 0.." + std::to_string(2 * n));
}

// Sum of C(2n, i) * poly[i] over indices i of the given parity (0 even, 1 odd),
// skipping `skip` (pass -1 to keep all).
inline Point parity_sum(const CurvePolygon& poly, int n, int parity, int skip = -1) {
  Point acc = zero_point(poly.dim());
  for (int i = parity; i <= 2 * n; i += 2) {
    if (i == skip) continue;
    acc += static_cast<double>(binomial(2 * n, i)) * poly[static_cast<std::size_t>(i)];
  }
  return acc;
}

inline double relative_floor(double scale) { return std::max(scale, 1.0); }

}  // namespace detail

/// D^n_k(P) = sum_i C(n,i) C(n,k-i) P_{i,k-i}.
inline Point d_operator(const ControlNet& net, int k) {
  const int n = net.degree();
  detail::require_diagonal_index(n, k);
  Point acc = zero_point(net.dim());
  for (int i = std::max(0, k - n); i <= std::min(k, n); ++i)
    acc += static_cast<double>(binomial(n, i) * binomial(n, k - i)) * net(i, k - i);
  return acc;
}

/// E^n_k(P) = sum_i C(n,i) C(n,k-i) P_{i,n-k+i}.
inline Point e_operator(const ControlNet& net, int k) {
  const int n = net.degree();
  detail::require_diagonal_index(n, k);
  Point acc = zero_point(net.dim());
  for (int i = std::max(0, k - n); i <= std::min(k, n); ++i)
    acc += static_cast<double>(binomial(n, i) * binomial(n, k - i)) * net(i, n - k + i);
  return acc;
}

inline DiagonalPair extract_diagonals(const ControlNet& net) {
  const int n = net.degree();
  std::vector<Point> q, r;
  q.reserve(static_cast<std::size_t>(2 * n + 1));
  r.reserve(static_cast<std::size_t>(2 * n + 1));
  for (int k = 0; k <= 2 * n; ++k) {
    const double c = static_cast<double>(binomial(2 * n, k));
    q.push_back(d_operator(net, k) / c);
    r.push_back(e_operator(net, k) / c);
  }
  return DiagonalPair(n, CurvePolygon(std::move(q)), CurvePolygon(std::move(r)));
}

/// sum C(2n,i) Q_i - sum C(2n,i) R_i; zero iff both diagonals share their
/// midpoint (the vector equals 4^n times the midpoint gap).
inline Point midpoint_condition(const DiagonalPair& pair) {
  const int n = pair.n;
  return detail::parity_sum(pair.q, n, 0) + detail::parity_sum(pair.q, n, 1) -
         detail::parity_sum(pair.r, n, 0) - detail::parity_sum(pair.r, n, 1);
}

/// Net with entries (-1)^{i+j} P_{i,j}.
inline ControlNet sign_flip_net(const ControlNet& net) {
  ControlNet out = net;
  for (int i = 0; i <= net.degree(); ++i)
    for (int j = 0; j <= net.degree(); ++j)
      if ((i + j) % 2 != 0) out(i, j) = -net(i, j);
  return out;
}

/// Evaluates the two parity-split linear conditions a pair must satisfy to be
/// the diagonals of some degree n x n patch.
///
/// Even n: a = sum_even C Q - sum_even C R, b = sum_odd C Q - sum_odd C R.
/// Odd n:  a = sum_even C Q - sum_odd C R,  b = sum_odd C Q - sum_even C R.
inline CompatibilityReport check_compatibility(const DiagonalPair& pair, double tol = kDefaultTolerance) {
  const int n = pair.n;
  CompatibilityReport rep;
  rep.n = n;
  rep.parity = parity_of(n);
  rep.tol = tol;
  const Point q_even = detail::parity_sum(pair.q, n, 0);
  const Point q_odd = detail::parity_sum(pair.q, n, 1);
  const Point r_even = detail::parity_sum(pair.r, n, 0);
  const Point r_odd = detail::parity_sum(pair.r, n, 1);
  if (rep.parity == Parity::Even) {
    rep.residual_a = q_even - r_even;
    rep.residual_b = q_odd - r_odd;
  } else {
    rep.residual_a = q_even - r_odd;
    rep.residual_b = q_odd - r_even;
  }
  const auto pts = pair.all_points();
  rep.scale = bbox_diagonal(pts);
  rep.admissible = rep.max_residual() <= tol * detail::relative_floor(rep.scale);
  return rep;
}

/// Replaces the central control points so that the admissibility conditions hold
/// exactly: Q_n and R_n for odd n, Q_n and R_{n+1} for even n. Every other
/// control point is kept.
inline DiagonalPair repair_central(const DiagonalPair& pair) {
  const int n = pair.n;
  DiagonalPair out = pair;
  const auto un = static_cast<std::size_t>(n);
  if (n % 2 != 0) {
    // Q_n is odd-indexed: sum_odd Q = sum_even R.
    const double c = static_cast<double>(binomial(2 * n, n));
    out.q[un] = (detail::parity_sum(pair.r, n, 0) - detail::parity_sum(pair.q, n, 1, n)) / c;
    // R_n is odd-indexed: sum_odd R = sum_even Q.
    out.r[un] = (detail::parity_sum(pair.q, n, 0) - detail::parity_sum(pair.r, n, 1, n)) / c;
  } else {
    const double c_even = static_cast<double>(binomial(2 * n, n));
    const double c_odd = static_cast<double>(binomial(2 * n, n + 1));
    out.q[un] = (detail::parity_sum(pair.r, n, 0) - detail::parity_sum(pair.q, n, 0, n)) / c_even;
    out.r[un + 1] = (detail::parity_sum(pair.q, n, 1) - detail::parity_sum(pair.r, n, 1, n + 1)) / c_odd;
  }
  return out;
}

/// Even n only: elevates both polygons by two degrees (surface degree n+1,
/// odd) and then applies the central repair, which keeps any symmetry of the
/// input because only the middle points move.
inline DiagonalPair repair_by_elevation(const DiagonalPair& pair) {
  if (pair.n % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "repair_by_elevation requires even n; use repair_central");
  DiagonalPair elevated(pair.n + 1, degree_elevate(degree_elevate(pair.q)),
                        degree_elevate(degree_elevate(pair.r)));
  return repair_central(elevated);
}

/// Closest admissible pair in the summed squared distance of control points.
///
/// Per coordinate, the pair is a vector x = (Q_0..Q_2n, R_0..R_2n) and the
/// two conditions are c_a . x = 0 and c_b . x = 0. The supports of c_a and
/// c_b are disjoint, so the projection decouples:
///   x' = x - c_a (c_a.x)/|c_a|^2 - c_b (c_b.x)/|c_b|^2.
inline DiagonalPair project_to_admissible(const DiagonalPair& pair) {
  const int n = pair.n;
  const auto rep = check_compatibility(pair);
  const bool even = rep.parity == Parity::Even;

  // Which residual (a = 0, b = 1) a coefficient of Q_k / R_k belongs to.
  auto q_group = [](int k) { return k % 2 == 0 ? 0 : 1; };
  auto r_group = [even](int k) { return (k % 2 == 0) == even ? 0 : 1; };

  std::array<double, 2> norm2{0.0, 0.0};
  for (int k = 0; k <= 2 * n; ++k) {
    const double c = static_cast<double>(binomial(2 * n, k));
    norm2[static_cast<std::size_t>(q_group(k))] += c * c;
    norm2[static_cast<std::size_t>(r_group(k))] += c * c;
  }
  const std::array<Point, 2> lambda{rep.residual_a / norm2[0], rep.residual_b / norm2[1]};

  DiagonalPair out = pair;
  for (int k = 0; k <= 2 * n; ++k) {
    const double c = static_cast<double>(binomial(2 * n, k));
    const auto uk = static_cast<std::size_t>(k);
    out.q[uk] -= c * lambda[static_cast<std::size_t>(q_group(k))];
    out.r[uk] += c * lambda[static_cast<std::size_t>(r_group(k))];
  }
  return out;
}

enum class RepairMode { Central, Elevate, Project };

inline constexpr std::string_view to_string(RepairMode m) {
  switch (m) {
    case RepairMode::Central: return "central";
    case RepairMode::Elevate: return "elevate";
    case RepairMode::Project: return "project";
  }
  return "central";
}

inline RepairMode parse_repair_mode(std::string_view s) {
  if (s == "central") return RepairMode::Central;
  if (s == "elevate") return RepairMode::Elevate;
  if (s == "project") return RepairMode::Project;
  throw Error(ErrorCode::InvalidArgument, "unknown repair mode '" + std::string(s) + "'");
}

/// Central substitution for odd n; projection for even n, where central
/// substitution of Q_n and R_{n+1} can break a symmetric input.
inline RepairMode default_repair_mode(int n) { return n % 2 != 0 ? RepairMode::Central : RepairMode::Project; }

inline DiagonalPair repair(const DiagonalPair& pair, RepairMode mode) {
  switch (mode) {
    case RepairMode::Central: return repair_central(pair);
    case RepairMode::Elevate: return repair_by_elevation(pair);
    case RepairMode::Project: return project_to_admissible(pair);
  }
  return pair;
}

}  // namespace diagbez
