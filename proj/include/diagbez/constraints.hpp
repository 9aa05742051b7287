#pragma once

// Linear systems tying a control net to prescribed diagonals, optionally with
// a prescribed boundary or C1 boundary (boundary plus the adjacent ring), and
// the affine family of nets solving them.

#include <Eigen/Dense>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "diagbez/bezier.hpp"
#include "diagbez/diagonals.hpp"
#include "diagbez/errors.hpp"
#include "diagbez/exact_elimination.hpp"

namespace diagbez {

enum class PrescriptionMode { DiagonalsOnly, BoundaryAndDiagonals, C1BoundaryAndDiagonals };

inline constexpr std::string_view to_string(PrescriptionMode m) {
  switch (m) {
    case PrescriptionMode::DiagonalsOnly: return "diagonals";
    case PrescriptionMode::BoundaryAndDiagonals: return "boundary";
    case PrescriptionMode::C1BoundaryAndDiagonals: return "c1";
  }
  return "diagonals";
}

inline PrescriptionMode parse_prescription_mode(std::string_view s) {
  if (s == "diagonals") return PrescriptionMode::DiagonalsOnly;
  if (s == "boundary") return PrescriptionMode::BoundaryAndDiagonals;
  if (s == "c1") return PrescriptionMode::C1BoundaryAndDiagonals;
  throw Error(ErrorCode::InvalidArgument, "unknown prescription mode '" + std::string(s) + "'");
}

/// Smallest degree for which a mode is meaningful.
inline int min_degree(PrescriptionMode m) {
  switch (m) {
    case PrescriptionMode::DiagonalsOnly: return 1;
    case PrescriptionMode::BoundaryAndDiagonals: return 2;
    case PrescriptionMode::C1BoundaryAndDiagonals: return 4;
  }
  return 1;
}

/// Smallest degree for which the closed-form dimension count applies.
inline int formula_min_degree(PrescriptionMode m) {
  switch (m) {
    case PrescriptionMode::DiagonalsOnly: return 1;
    case PrescriptionMode::BoundaryAndDiagonals: return 3;
    case PrescriptionMode::C1BoundaryAndDiagonals: return 5;
  }
  return 1;
}

inline void require_mode_degree(int n, PrescriptionMode m) {
  if (n < min_degree(m))
    throw Error(ErrorCode::ModeDegree, "mode '" + std::string(to_string(m)) + "' needs n >= " +
                                           std::to_string(min_degree(m)) + ", got n = " + std::to_string(n));
}

/// Position (i, j) in a control net.
struct Slot {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

inline std::string to_string(const Slot& s) {
  return "P(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
}

/// The four edge polygons of the net: rows i = 0, i = n and columns j = 0,
/// j = n, each listed by increasing running index.
struct BoundaryData {
  std::vector<Point> row_first;
  std::vector<Point> row_last;
  std::vector<Point> col_first;
  std::vector<Point> col_last;

  static BoundaryData from_net(const ControlNet& net) {
    const int n = net.degree();
    BoundaryData b;
    for (int t = 0; t <= n; ++t) {
      b.row_first.push_back(net(0, t));
      b.row_last.push_back(net(n, t));
      b.col_first.push_back(net(t, 0));
      b.col_last.push_back(net(t, n));
    }
    return b;
  }
};

/// Boundary plus the adjacent rings: rows i = 1, i = n-1 and columns j = 1,
/// j = n-1. Entries shared with the boundary or with each other must agree.
struct C1BoundaryData {
  BoundaryData boundary;
  std::vector<Point> row_second;
  std::vector<Point> row_penultimate;
  std::vector<Point> col_second;
  std::vector<Point> col_penultimate;

  static C1BoundaryData from_net(const ControlNet& net) {
    const int n = net.degree();
    C1BoundaryData c;
    c.boundary = BoundaryData::from_net(net);
    for (int t = 0; t <= n; ++t) {
      c.row_second.push_back(net(1, t));
      c.row_penultimate.push_back(net(n - 1, t));
      c.col_second.push_back(net(t, 1));
      c.col_penultimate.push_back(net(t, n - 1));
    }
    return c;
  }
};

using BoundaryPrescription = std::variant<std::monostate, BoundaryData, C1BoundaryData>;

/// Everything a user prescribes for one patch.
struct Prescription {
  int n = 0;
  PrescriptionMode mode = PrescriptionMode::DiagonalsOnly;
  DiagonalPair pair;
  BoundaryPrescription boundary;
};

/// Error raised for prescriptions that cannot be realized; carries the
/// offending residual vectors (and the compatibility report, if relevant).
class PrescriptionError : public Error {
 public:
  PrescriptionError(ErrorCode code, const std::string& what, std::vector<Point> residuals,
                    std::optional<CompatibilityReport> report = std::nullopt)
      : Error(code, what), residuals_(std::move(residuals)), report_(std::move(report)) {}

  const std::vector<Point>& residuals() const { return residuals_; }
  const std::optional<CompatibilityReport>& report() const { return report_; }

 private:
  std::vector<Point> residuals_;
  std::optional<CompatibilityReport> report_;
};

namespace detail {

inline void put_slot(std::map<Slot, Point>& out, Slot s, const Point& p, const char* what) {
  if (!is_finite(p)) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": non-finite point");
  auto [it, inserted] = out.emplace(s, p);
  if (!inserted && it->second != p)
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": overlapping entries disagree at " + to_string(s));
}

inline void put_row(std::map<Slot, Point>& out, int n, const std::vector<Point>& pts, int i, const char* what) {
  if (pts.size() != static_cast<std::size_t>(n + 1))
    throw Error(ErrorCode::Shape, std::string(what) + ": edge needs n+1 points");
  for (int t = 0; t <= n; ++t) put_slot(out, {i, t}, pts[static_cast<std::size_t>(t)], what);
}

inline void put_col(std::map<Slot, Point>& out, int n, const std::vector<Point>& pts, int j, const char* what) {
  if (pts.size() != static_cast<std::size_t>(n + 1))
    throw Error(ErrorCode::Shape, std::string(what) + ": edge needs n+1 points");
  for (int t = 0; t <= n; ++t) put_slot(out, {t, j}, pts[static_cast<std::size_t>(t)], what);
}

inline void put_boundary(std::map<Slot, Point>& out, int n, const BoundaryData& b) {
  put_row(out, n, b.row_first, 0, "boundary");
  put_row(out, n, b.row_last, n, "boundary");
  put_col(out, n, b.col_first, 0, "boundary");
  put_col(out, n, b.col_last, n, "boundary");
}

}  // namespace detail

/// Net slots fixed by the boundary part of a prescription, validated for
/// shape and overlap consistency.
inline std::map<Slot, Point> prescribed_slots(int n, PrescriptionMode mode, const BoundaryPrescription& data) {
  std::map<Slot, Point> out;
  switch (mode) {
    case PrescriptionMode::DiagonalsOnly:
      if (!std::holds_alternative<std::monostate>(data))
        throw Error(ErrorCode::InvalidArgument, "diagonals mode takes no boundary data");
      break;
    case PrescriptionMode::BoundaryAndDiagonals: {
      const auto* b = std::get_if<BoundaryData>(&data);
      if (b == nullptr) throw Error(ErrorCode::InvalidArgument, "boundary mode needs boundary data");
      detail::put_boundary(out, n, *b);
      break;
    }
    case PrescriptionMode::C1BoundaryAndDiagonals: {
      const auto* c = std::get_if<C1BoundaryData>(&data);
      if (c == nullptr) throw Error(ErrorCode::InvalidArgument, "c1 mode needs boundary and ring data");
      detail::put_boundary(out, n, c->boundary);
      detail::put_row(out, n, c->row_second, 1, "ring");
      detail::put_row(out, n, c->row_penultimate, n - 1, "ring");
      detail::put_col(out, n, c->col_second, 1, "ring");
      detail::put_col(out, n, c->col_penultimate, n - 1, "ring");
      break;
    }
  }
  if (!out.empty() && out.begin()->second.size() < 1) throw Error(ErrorCode::Shape, "zero-dimensional boundary point");
  for (const auto& [slot, p] : out)
    if (p.size() != out.begin()->second.size()) throw Error(ErrorCode::Shape, "mixed point dimensions in boundary");
  return out;
}

enum class RowKind { D, E };

/// One equation D^n_k(P) = C(2n,k) Q_k or E^n_k(P) = C(2n,k) R_k.
struct ConstraintRow {
  RowKind kind = RowKind::D;
  int k = 0;
  /// Integer coefficients C(n,i) C(n,k-i) of every net slot on the row.
  std::vector<std::pair<Slot, std::int64_t>> coeffs;
  /// C(2n,k) Q_k or C(2n,k) R_k.
  Point target;
  /// target minus the contribution of prescribed slots.
  Point rhs;
};

struct ConstraintSystem {
  int n = 0;
  PrescriptionMode mode = PrescriptionMode::DiagonalsOnly;
  DiagonalPair pair;
  std::vector<ConstraintRow> rows;
  std::map<Slot, Point> prescribed;
  /// Unprescribed slots in column order (i+j ascending, then i ascending).
  std::vector<Slot> unknowns;
  /// Bounding-box diagonal of the pair and all prescribed points.
  double scale = 0.0;
  double tol = kDefaultTolerance;
};

namespace detail {

inline std::vector<std::pair<Slot, std::int64_t>> row_coefficients(int n, RowKind kind, int k) {
  std::vector<std::pair<Slot, std::int64_t>> out;
  for (int i = std::max(0, k - n); i <= std::min(k, n); ++i) {
    const auto c = static_cast<std::int64_t>(binomial(n, i) * binomial(n, k - i));
    out.push_back({kind == RowKind::D ? Slot{i, k - i} : Slot{i, n - k + i}, c});
  }
  return out;
}

inline std::vector<Slot> ordered_slots(int n) {
  std::vector<Slot> all;
  for (int s = 0; s <= 2 * n; ++s)
    for (int i = std::max(0, s - n); i <= std::min(s, n); ++i) all.push_back({i, s - i});
  return all;
}

}  // namespace detail

/// Builds the system without the admissibility pre-check. Rows that only
/// involve prescribed slots are not part of the system; they are checked
/// against the pair instead (CornerMismatch for k in {0,1,2n-1,2n},
/// RingMismatch otherwise).
inline ConstraintSystem assemble_system(const DiagonalPair& pair, PrescriptionMode mode,
                                        const BoundaryPrescription& boundary = {},
                                        double tol = kDefaultTolerance) {
  const int n = pair.n;
  require_mode_degree(n, mode);
  ConstraintSystem sys;
  sys.n = n;
  sys.mode = mode;
  sys.pair = pair;
  sys.tol = tol;
  sys.prescribed = prescribed_slots(n, mode, boundary);
  if (!sys.prescribed.empty() && sys.prescribed.begin()->second.size() != pair.dim())
    throw Error(ErrorCode::Shape, "boundary and diagonal points differ in dimension");
  for (const auto& s : detail::ordered_slots(n))
    if (!sys.prescribed.contains(s)) sys.unknowns.push_back(s);

  auto pts = pair.all_points();
  for (const auto& [s, p] : sys.prescribed) pts.push_back(p);
  sys.scale = bbox_diagonal(pts);
  const double limit = tol * detail::relative_floor(sys.scale);

  for (RowKind kind : {RowKind::D, RowKind::E}) {
    const CurvePolygon& poly = kind == RowKind::D ? pair.q : pair.r;
    for (int k = 0; k <= 2 * n; ++k) {
      const double c2n = static_cast<double>(binomial(2 * n, k));
      ConstraintRow row;
      row.kind = kind;
      row.k = k;
      row.target = c2n * poly[static_cast<std::size_t>(k)];
      row.rhs = row.target;
      bool has_unknown = false;
      for (const auto& [slot, c] : detail::row_coefficients(n, kind, k)) {
        if (auto it = sys.prescribed.find(slot); it != sys.prescribed.end()) {
          row.rhs -= static_cast<double>(c) * it->second;
        } else {
          row.coeffs.push_back({slot, c});
          has_unknown = true;
        }
      }
      if (has_unknown) {
        sys.rows.push_back(std::move(row));
        continue;
      }
      // Fully prescribed row: the diagonal point is determined by the net.
      const Point gap = -row.rhs / c2n;
      if (gap.norm() > limit) {
        const bool corner = k <= 1 || k >= 2 * n - 1;
        const std::string name = std::string(kind == RowKind::D ? "Q_" : "R_") + std::to_string(k);
        throw PrescriptionError(corner ? ErrorCode::CornerMismatch : ErrorCode::RingMismatch,
                                name + " disagrees with the prescribed " + (corner ? "boundary" : "ring") +
                                    " by " + std::to_string(gap.norm()),
                                {gap});
      }
    }
  }
  return sys;
}

/// Checks admissibility of the pair, then assembles the system.
inline ConstraintSystem build_system(const DiagonalPair& pair, PrescriptionMode mode,
                                     const BoundaryPrescription& boundary = {}, double tol = kDefaultTolerance) {
  require_mode_degree(pair.n, mode);
  const auto report = check_compatibility(pair, tol);
  if (!report.admissible)
    throw PrescriptionError(ErrorCode::InadmissiblePair,
                            "diagonal pair is not admissible (max residual " +
                                std::to_string(report.max_residual()) +
                                "); repair it with central, elevate or project",
                            {report.residual_a, report.residual_b}, report);
  return assemble_system(pair, mode, boundary, tol);
}

inline ConstraintSystem build_system(const Prescription& p, double tol = kDefaultTolerance) {
  if (p.pair.n != p.n) throw Error(ErrorCode::Shape, "prescription degree disagrees with its pair");
  return build_system(p.pair, p.mode, p.boundary, tol);
}

enum class FillStrategy { Coons, Dirichlet };

inline constexpr std::string_view to_string(FillStrategy f) { return f == FillStrategy::Coons ? "coons" : "dirichlet"; }

inline FillStrategy parse_fill_strategy(std::string_view s) {
  if (s == "coons") return FillStrategy::Coons;
  if (s == "dirichlet") return FillStrategy::Dirichlet;
  throw Error(ErrorCode::InvalidArgument, "unknown fill strategy '" + std::string(s) + "'");
}

/// A dependent slot written as an affine function of the free slots:
/// value = offset(slot) + sum_f coeffs[f] * free_value[f].
struct Dependency {
  Slot slot;
  std::vector<Rational> coeffs;
};

/// Affine family of nets satisfying a constraint system.
struct SolutionSpace {
  int n = 0;
  PrescriptionMode mode = PrescriptionMode::DiagonalsOnly;
  DiagonalPair pair;
  std::map<Slot, Point> prescribed;
  std::vector<Slot> free_slots;
  std::vector<Dependency> dependencies;
  /// Net with all free values set to zero.
  ControlNet offset;
  FillStrategy fill = FillStrategy::Dirichlet;
  /// Default value per free slot, from `fill`.
  std::vector<Point> defaults;
  /// offset realized with `defaults`.
  ControlNet particular;
  double scale = 0.0;

  int dimension() const { return static_cast<int>(free_slots.size()); }
};

using FreeValues = std::map<Slot, Point>;

namespace detail {

inline IntMatrix coefficient_matrix(const ConstraintSystem& sys, const std::vector<Slot>& columns) {
  std::map<Slot, std::size_t> col_of;
  for (std::size_t c = 0; c < columns.size(); ++c) col_of[columns[c]] = c;
  IntMatrix a(sys.rows.size(), columns.size());
  for (std::size_t r = 0; r < sys.rows.size(); ++r)
    for (const auto& [slot, c] : sys.rows[r].coeffs)
      if (auto it = col_of.find(slot); it != col_of.end()) a(r, it->second) = c;
  return a;
}

// Default free block: rows b..n-2-b, columns b+1..n-1-b with b the number of
// prescribed rings (0, 1, 2). Its size matches the closed-form dimension.
inline std::vector<Slot> preferred_block(int n, PrescriptionMode mode) {
  const int b = mode == PrescriptionMode::DiagonalsOnly ? 0 : mode == PrescriptionMode::BoundaryAndDiagonals ? 1 : 2;
  std::vector<Slot> out;
  for (int i = b; i <= n - 2 - b; ++i)
    for (int j = b + 1; j <= n - 1 - b; ++j) out.push_back({i, j});
  return out;
}

inline Point realize_point(const SolutionSpace& space, const Dependency& dep, const std::vector<Point>& values) {
  Point p = space.offset(dep.slot.i, dep.slot.j);
  for (std::size_t f = 0; f < values.size(); ++f)
    if (dep.coeffs[f] != 0) p += to_double(dep.coeffs[f]) * values[f];
  return p;
}

inline ControlNet realize_values(const SolutionSpace& space, const std::vector<Point>& values) {
  ControlNet net = space.offset;
  for (std::size_t f = 0; f < space.free_slots.size(); ++f) net(space.free_slots[f].i, space.free_slots[f].j) = values[f];
  for (const auto& dep : space.dependencies) net(dep.slot.i, dep.slot.j) = realize_point(space, dep, values);
  return net;
}

}  // namespace detail

/// Whether `slots` is a valid set of free parameters: the remaining unknown
/// columns must be independent and span the coefficient matrix's column space.
inline bool is_free_set(const ConstraintSystem& sys, const std::vector<Slot>& slots) {
  const std::set<Slot> chosen(slots.begin(), slots.end());
  if (chosen.size() != slots.size()) return false;
  std::vector<Slot> rest;
  for (const auto& s : slots)
    if (std::find(sys.unknowns.begin(), sys.unknowns.end(), s) == sys.unknowns.end()) return false;
  for (const auto& s : sys.unknowns)
    if (!chosen.contains(s)) rest.push_back(s);
  const auto full = rank(detail::coefficient_matrix(sys, sys.unknowns));
  return rest.size() == full && rank(detail::coefficient_matrix(sys, rest)) == full;
}

/// Exact rank of the system's coefficient matrix over its unknown slots.
inline std::size_t system_rank(const ConstraintSystem& sys) {
  return rank(detail::coefficient_matrix(sys, sys.unknowns));
}

/// Dimension of the left null space (vanishing combinations of rows).
inline std::size_t left_nullity(const ConstraintSystem& sys) { return sys.rows.size() - system_rank(sys); }

inline std::map<Slot, Point> fill_free(const SolutionSpace& space, FillStrategy strategy);

struct SolveOptions {
  FillStrategy fill = FillStrategy::Dirichlet;
  /// Slots to keep free when they form a valid free set; empty selects the
  /// default block.
  std::vector<Slot> preferred_free;
};

/// Solves the system exactly: rank and dependency table over the rationals,
/// point data in floating point. Throws Inconsistent when the right-hand side
/// violates a vanishing row combination beyond tolerance.
inline SolutionSpace solve_space(const ConstraintSystem& sys, const SolveOptions& opts = {}) {
  const auto dim = sys.pair.dim();

  // Column order: (i+j, i), with preferred free slots moved to the back so the
  // greedy pivot search leaves them free whenever possible.
  std::vector<Slot> preferred = opts.preferred_free.empty() ? detail::preferred_block(sys.n, sys.mode) : opts.preferred_free;
  std::vector<Slot> columns;
  std::vector<Slot> tail;
  for (const auto& s : sys.unknowns)
    (std::find(preferred.begin(), preferred.end(), s) != preferred.end() ? tail : columns).push_back(s);
  columns.insert(columns.end(), tail.begin(), tail.end());

  const auto ech = reduce(detail::coefficient_matrix(sys, columns));
  const std::size_t m = sys.rows.size();

  const double limit = sys.tol * detail::relative_floor(sys.scale);
  for (std::size_t r = ech.rank; r < m; ++r) {
    Rational biggest = 0;
    for (std::size_t c = 0; c < m; ++c) biggest = std::max(biggest, Rational(abs(ech.transform(r, c))));
    Point acc = zero_point(dim);
    for (std::size_t c = 0; c < m; ++c)
      if (ech.transform(r, c) != 0) acc += to_double(ech.transform(r, c) / biggest) * sys.rows[c].rhs;
    if (acc.norm() > limit)
      throw PrescriptionError(ErrorCode::Inconsistent,
                              "constraint system is inconsistent (residual " + std::to_string(acc.norm()) + ")", {acc});
  }

  SolutionSpace space;
  space.n = sys.n;
  space.mode = sys.mode;
  space.pair = sys.pair;
  space.prescribed = sys.prescribed;
  space.scale = sys.scale;
  space.fill = opts.fill;
  const auto free_cols = ech.free_cols();
  for (auto c : free_cols) space.free_slots.push_back(columns[c]);

  space.offset = ControlNet(sys.n, dim);
  for (const auto& [s, p] : sys.prescribed) space.offset(s.i, s.j) = p;
  for (std::size_t p = 0; p < ech.rank; ++p) {
    const std::size_t col = ech.pivot_cols[p];
    Point value = zero_point(dim);
    for (std::size_t r = 0; r < m; ++r)
      if (ech.transform(p, r) != 0) value += to_double(ech.transform(p, r)) * sys.rows[r].rhs;
    const Slot slot = columns[col];
    space.offset(slot.i, slot.j) = value;
    Dependency dep{slot, {}};
    for (auto f : free_cols) dep.coeffs.push_back(-ech.reduced(p, f));
    space.dependencies.push_back(std::move(dep));
  }

  const auto filled = fill_free(space, opts.fill);
  for (const auto& s : space.free_slots) space.defaults.push_back(filled.at(s));
  space.particular = detail::realize_values(space, space.defaults);
  return space;
}

/// Net of the family for the given free values; missing slots take the
/// space's default fill.
inline ControlNet realize(const SolutionSpace& space, const FreeValues& free_values = {}) {
  std::vector<Point> values = space.defaults;
  for (const auto& [slot, p] : free_values) {
    auto it = std::find(space.free_slots.begin(), space.free_slots.end(), slot);
    if (it == space.free_slots.end())
      throw Error(ErrorCode::UnknownSlot, to_string(slot) + " is not a free slot of this solution space");
    if (p.size() != space.pair.dim()) throw Error(ErrorCode::Shape, "free value has the wrong dimension");
    if (!is_finite(p)) throw Error(ErrorCode::InvalidArgument, "free value is not finite");
    values[static_cast<std::size_t>(it - space.free_slots.begin())] = p;
  }
  return detail::realize_values(space, values);
}

namespace detail {

// Scalar grid of slot weights: 1 at free slot f, its rational coefficient at
// each dependent slot, 0 elsewhere.
inline std::vector<double> influence_grid(const SolutionSpace& space, std::size_t f) {
  const int n = space.n;
  std::vector<double> g(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
  auto at = [n](Slot s) { return static_cast<std::size_t>(s.i * (n + 1) + s.j); };
  g[at(space.free_slots[f])] = 1.0;
  for (const auto& dep : space.dependencies) g[at(dep.slot)] = to_double(dep.coeffs[f]);
  return g;
}

inline std::vector<std::pair<std::size_t, std::size_t>> net_edges(int n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  auto at = [n](int i, int j) { return static_cast<std::size_t>(i * (n + 1) + j); };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      if (j < n) out.push_back({at(i, j), at(i, j + 1)});
      if (i < n) out.push_back({at(i, j), at(i + 1, j)});
    }
  return out;
}

inline std::vector<Point> dirichlet_values(const SolutionSpace& space) {
  const std::size_t k = space.free_slots.size();
  const auto dim = space.pair.dim();
  const auto edges = net_edges(space.n);
  std::vector<std::vector<double>> grids;
  for (std::size_t f = 0; f < k; ++f) grids.push_back(influence_grid(space, f));

  // E(v) = sum_e |d_offset(e) + sum_f v_f d_G_f(e)|^2, separable per coordinate.
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), dim);
  const auto& base = space.offset.points();
  for (const auto& [a, b] : edges) {
    Eigen::VectorXd dg(static_cast<Eigen::Index>(k));
    for (std::size_t f = 0; f < k; ++f) dg(static_cast<Eigen::Index>(f)) = grids[f][b] - grids[f][a];
    normal += dg * dg.transpose();
    rhs -= dg * (base[b] - base[a]).transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (lu.rank() < static_cast<Eigen::Index>(k))
    throw Error(ErrorCode::SingularSystem, "Dirichlet normal equations are singular");
  const Eigen::MatrixXd sol = lu.solve(rhs);
  std::vector<Point> out;
  for (std::size_t f = 0; f < k; ++f) out.push_back(sol.row(static_cast<Eigen::Index>(f)).transpose());
  return out;
}

inline Point coons_value(const ControlNet& net, int i, int j) {
  const int n = net.degree();
  const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
  return (1 - u) * net(0, j) + u * net(n, j) + (1 - v) * net(i, 0) + v * net(i, n) -
         ((1 - u) * (1 - v) * net(0, 0) + (1 - u) * v * net(0, n) + u * (1 - v) * net(n, 0) + u * v * net(n, n));
}

inline std::vector<Point> coons_values(const SolutionSpace& space) {
  const int n = space.n;
  const auto& c = space.offset;
  // Corners never depend on free values, so the offset net already holds them.
  std::vector<Point> seed;
  for (const auto& s : space.free_slots) {
    const double u = static_cast<double>(s.i) / n, v = static_cast<double>(s.j) / n;
    seed.push_back((1 - u) * (1 - v) * c(0, 0) + (1 - u) * v * c(0, n) + u * (1 - v) * c(n, 0) + u * v * c(n, n));
  }
  const ControlNet first = realize_values(space, seed);
  std::vector<Point> out;
  for (const auto& s : space.free_slots) out.push_back(coons_value(first, s.i, s.j));
  return out;
}

}  // namespace detail

/// Values for the free slots chosen by a fill strategy: Coons (bilinearly
/// blended boundary) or Dirichlet (minimal sum of squared differences of
/// horizontally and vertically adjacent net points).
inline std::map<Slot, Point> fill_free(const SolutionSpace& space, FillStrategy strategy) {
  std::map<Slot, Point> out;
  if (space.free_slots.empty()) return out;
  const auto values = strategy == FillStrategy::Coons ? detail::coons_values(space) : detail::dirichlet_values(space);
  for (std::size_t f = 0; f < values.size(); ++f) out[space.free_slots[f]] = values[f];
  return out;
}

/// Discrete Dirichlet energy of a net.
inline double dirichlet_energy(const ControlNet& net) {
  double e = 0.0;
  const int n = net.degree();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      if (j < n) e += (net(i, j + 1) - net(i, j)).squaredNorm();
      if (i < n) e += (net(i + 1, j) - net(i, j)).squaredNorm();
    }
  return e;
}

/// Largest residual of a net against every row of a system (absolute).
inline double max_row_residual(const ConstraintSystem& sys, const ControlNet& net) {
  double worst = 0.0;
  for (const auto& row : sys.rows) {
    Point acc = -row.rhs;
    for (const auto& [slot, c] : row.coeffs) acc += static_cast<double>(c) * net(slot.i, slot.j);
    worst = std::max(worst, acc.norm());
  }
  return worst;
}

/// System with all-zero data: only its coefficient structure is meaningful.
inline ConstraintSystem structural_system(int n, PrescriptionMode mode) {
  require_mode_degree(n, mode);
  ControlNet net(n, 1);
  BoundaryPrescription b;
  if (mode == PrescriptionMode::BoundaryAndDiagonals) b = BoundaryData::from_net(net);
  if (mode == PrescriptionMode::C1BoundaryAndDiagonals) b = C1BoundaryData::from_net(net);
  return assemble_system(extract_diagonals(net), mode, b);
}

struct DimensionInfo {
  int dimension = 0;
  /// True when n lies outside the range where the closed form applies; the
  /// dimension is then the computed one.
  bool formula_exempt = false;
};

/// (n-1)^2, (n-3)^2 or (n-5)^2 inside the validated ranges; the exactly
/// computed dimension outside them.
inline DimensionInfo dimension_formula(int n, PrescriptionMode mode) {
  if (n >= formula_min_degree(mode)) {
    const int shift = mode == PrescriptionMode::DiagonalsOnly ? 1 : mode == PrescriptionMode::BoundaryAndDiagonals ? 3 : 5;
    return {(n - shift) * (n - shift), false};
  }
  const auto sys = structural_system(n, mode);
  return {static_cast<int>(sys.unknowns.size() - system_rank(sys)), true};
}

}  // namespace diagbez
