#pragma once

// Text documents for nets, curves, diagonal pairs, prescriptions, solution
// spaces and compatibility reports, plus OBJ mesh export.
//
// Every document is one JSON object whose first keys are "kind" and
// "version"; keys are written in a fixed order and doubles in shortest
// round-trip form, so write(read(write(d))) is byte-identical to write(d).

#include <charconv>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "diagbez/bezier.hpp"
#include "diagbez/constraints.hpp"
#include "diagbez/diagonals.hpp"
#include "diagbez/errors.hpp"

namespace diagbez::io {

using Json = nlohmann::ordered_json;

inline constexpr int kVersion = 1;

enum class DocumentKind { Net, Curve, DiagonalPair, Prescription, SolutionSpace, Report };

inline constexpr std::string_view to_string(DocumentKind k) {
  switch (k) {
    case DocumentKind::Net: return "net";
    case DocumentKind::Curve: return "curve";
    case DocumentKind::DiagonalPair: return "diagonal_pair";
    case DocumentKind::Prescription: return "prescription";
    case DocumentKind::SolutionSpace: return "solution_space";
    case DocumentKind::Report: return "report";
  }
  return "net";
}

using Payload = std::variant<ControlNet, CurvePolygon, DiagonalPair, Prescription, SolutionSpace, CompatibilityReport>;

struct Document {
  int version = kVersion;
  Payload payload;

  DocumentKind kind() const { return static_cast<DocumentKind>(payload.index()); }

  template <typename T>
  const T& as() const {
    if (const auto* p = std::get_if<T>(&payload)) return *p;
    throw Error(ErrorCode::Shape, "document is a " + std::string(to_string(kind())) + ", not the expected kind");
  }
};

// ---------------------------------------------------------------------------
// Encoding

namespace detail {

inline Json point_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index c = 0; c < p.size(); ++c) a.push_back(p(c));
  return a;
}

inline Json points_json(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

inline Json grid_json(const ControlNet& net) {
  Json rows = Json::array();
  for (int i = 0; i <= net.degree(); ++i) {
    Json row = Json::array();
    for (int j = 0; j <= net.degree(); ++j) row.push_back(point_json(net(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json slot_json(const Slot& s) { return Json::array({s.i, s.j}); }

inline Json integer_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

inline Json rational_json(const Rational& q) {
  return Json::array({integer_json(numerator(q)), integer_json(denominator(q))});
}

inline Json curve_payload(const CurvePolygon& c) {
  Json j;
  j["degree"] = c.degree();
  j["points"] = points_json(c.points());
  return j;
}

inline Json pair_payload(const DiagonalPair& p) {
  Json j;
  j["n"] = p.n;
  j["q"] = curve_payload(p.q);
  j["r"] = curve_payload(p.r);
  return j;
}

inline Json boundary_payload(const BoundaryData& b) {
  Json j;
  j["row_first"] = points_json(b.row_first);
  j["row_last"] = points_json(b.row_last);
  j["col_first"] = points_json(b.col_first);
  j["col_last"] = points_json(b.col_last);
  return j;
}

inline Json header(DocumentKind k) {
  Json j;
  j["kind"] = std::string(to_string(k));
  j["version"] = kVersion;
  return j;
}

inline Json encode(const ControlNet& net) {
  Json j = header(DocumentKind::Net);
  j["degree"] = net.degree();
  j["points"] = grid_json(net);
  return j;
}

inline Json encode(const CurvePolygon& c) {
  Json j = header(DocumentKind::Curve);
  j["degree"] = c.degree();
  j["points"] = points_json(c.points());
  return j;
}

inline Json encode(const DiagonalPair& p) {
  Json j = header(DocumentKind::DiagonalPair);
  j.update(pair_payload(p));
  return j;
}

inline Json encode(const Prescription& p) {
  Json j = header(DocumentKind::Prescription);
  j["n"] = p.n;
  j["mode"] = std::string(to_string(p.mode));
  j["pair"] = pair_payload(p.pair);
  if (const auto* b = std::get_if<BoundaryData>(&p.boundary)) j["boundary"] = boundary_payload(*b);
  if (const auto* c = std::get_if<C1BoundaryData>(&p.boundary)) {
    j["boundary"] = boundary_payload(c->boundary);
    Json rings;
    rings["row_second"] = points_json(c->row_second);
    rings["row_penultimate"] = points_json(c->row_penultimate);
    rings["col_second"] = points_json(c->col_second);
    rings["col_penultimate"] = points_json(c->col_penultimate);
    j["rings"] = std::move(rings);
  }
  return j;
}

inline Json encode(const SolutionSpace& s) {
  Json j = header(DocumentKind::SolutionSpace);
  j["n"] = s.n;
  j["mode"] = std::string(to_string(s.mode));
  j["dimension"] = s.dimension();
  j["fill"] = std::string(to_string(s.fill));
  j["scale"] = s.scale;
  j["pair"] = pair_payload(s.pair);
  Json prescribed = Json::array();
  for (const auto& [slot, p] : s.prescribed) {
    Json e;
    e["slot"] = slot_json(slot);
    e["point"] = point_json(p);
    prescribed.push_back(std::move(e));
  }
  j["prescribed"] = std::move(prescribed);
  Json free = Json::array();
  for (const auto& slot : s.free_slots) free.push_back(slot_json(slot));
  j["free_slots"] = std::move(free);
  Json deps = Json::array();
  for (const auto& d : s.dependencies) {
    Json e;
    e["slot"] = slot_json(d.slot);
    Json coeffs = Json::array();
    for (const auto& c : d.coeffs) coeffs.push_back(rational_json(c));
    e["coeffs"] = std::move(coeffs);
    deps.push_back(std::move(e));
  }
  j["dependencies"] = std::move(deps);
  j["offset"] = grid_json(s.offset);
  j["defaults"] = points_json(s.defaults);
  j["particular"] = grid_json(s.particular);
  return j;
}

inline Json encode(const CompatibilityReport& r) {
  Json j = header(DocumentKind::Report);
  j["n"] = r.n;
  j["parity"] = std::string(to_string(r.parity));
  j["residual_a"] = point_json(r.residual_a);
  j["residual_b"] = point_json(r.residual_b);
  j["max_residual"] = r.max_residual();
  j["scale"] = r.scale;
  j["tol"] = r.tol;
  j["admissible"] = r.admissible;
  return j;
}

}  // namespace detail

inline Json to_json(const Document& doc) {
  return std::visit([](const auto& p) { return detail::encode(p); }, doc.payload);
}

template <typename T>
Json to_json(const T& payload) {
  return detail::encode(payload);
}

inline std::string write_document(const Document& doc) { return to_json(doc).dump(2) + "\n"; }

template <typename T>
std::string write_document(const T& payload) {
  return to_json(payload).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Decoding

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& path, const std::string& msg) {
  throw Error(code, (path.empty() ? std::string("/") : path) + ": " + msg);
}

inline const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(ErrorCode::Parse, path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::Parse, path + "/" + key, "missing field");
  return *it;
}

inline int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(ErrorCode::Parse, path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    fail(ErrorCode::Parse, path, "integer out of range");
  return static_cast<int>(v);
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(ErrorCode::Parse, path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ErrorCode::Parse, path, "non-finite number");
  return v;
}

inline std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(ErrorCode::Parse, path, "expected a string");
  return j.get<std::string>();
}

inline Point point(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::Parse, path, "expected a non-empty coordinate array");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) p(static_cast<Eigen::Index>(c)) = number(j[c], path + "/" + std::to_string(c));
  return p;
}

inline std::vector<Point> points(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(ErrorCode::Parse, path, "expected an array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(point(j[i], path + "/" + std::to_string(i)));
    if (out.back().size() != out.front().size()) fail(ErrorCode::Shape, path + "/" + std::to_string(i), "mixed point dimensions");
  }
  return out;
}

inline ControlNet grid(const Json& j, int degree, const std::string& path) {
  if (degree < 1) fail(ErrorCode::Shape, path, "net degree must be positive");
  if (!j.is_array() || j.size() != static_cast<std::size_t>(degree + 1))
    fail(ErrorCode::Shape, path, "expected " + std::to_string(degree + 1) + " rows for degree " + std::to_string(degree));
  std::vector<Point> flat;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = path + "/" + std::to_string(i);
    auto row = points(j[i], rp);
    if (row.size() != static_cast<std::size_t>(degree + 1))
      fail(ErrorCode::Shape, rp, "expected " + std::to_string(degree + 1) + " points per row");
    for (auto& p : row) {
      if (!flat.empty() && p.size() != flat.front().size()) fail(ErrorCode::Shape, rp, "mixed point dimensions");
      flat.push_back(std::move(p));
    }
  }
  return ControlNet(degree, std::move(flat));
}

inline CurvePolygon curve(const Json& j, const std::string& path) {
  const int degree = integer(field(j, path, "degree"), path + "/degree");
  auto pts = points(field(j, path, "points"), path + "/points");
  if (degree < 0 || pts.size() != static_cast<std::size_t>(degree + 1))
    fail(ErrorCode::Shape, path + "/points",
         "degree " + std::to_string(degree) + " needs " + std::to_string(degree + 1) + " points, got " +
             std::to_string(pts.size()));
  return CurvePolygon(std::move(pts));
}

inline DiagonalPair pair(const Json& j, const std::string& path) {
  const int n = integer(field(j, path, "n"), path + "/n");
  auto q = curve(field(j, path, "q"), path + "/q");
  auto r = curve(field(j, path, "r"), path + "/r");
  if (n < 1) fail(ErrorCode::Shape, path + "/n", "surface degree must be positive");
  if (q.degree() != 2 * n) fail(ErrorCode::Shape, path + "/q", "degree must be 2n = " + std::to_string(2 * n));
  if (r.degree() != 2 * n) fail(ErrorCode::Shape, path + "/r", "degree must be 2n = " + std::to_string(2 * n));
  if (q.dim() != r.dim()) fail(ErrorCode::Shape, path, "q and r differ in point dimension");
  return DiagonalPair(n, std::move(q), std::move(r));
}

inline Slot slot(const Json& j, int n, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::Parse, path, "expected [i, j]");
  Slot s{integer(j[0], path + "/0"), integer(j[1], path + "/1")};
  if (s.i < 0 || s.j < 0 || s.i > n || s.j > n) fail(ErrorCode::Shape, path, "slot outside the net");
  return s;
}

inline BigInt big_integer(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, path, "malformed big integer");
    }
  }
  fail(ErrorCode::Parse, path, "expected an integer");
}

inline Rational rational(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::Parse, path, "expected [numerator, denominator]");
  const BigInt num = big_integer(j[0], path + "/0");
  const BigInt den = big_integer(j[1], path + "/1");
  if (den == 0) fail(ErrorCode::Parse, path + "/1", "zero denominator");
  return Rational(num) / Rational(den);
}

inline BoundaryData boundary(const Json& j, const std::string& path) {
  BoundaryData b;
  b.row_first = points(field(j, path, "row_first"), path + "/row_first");
  b.row_last = points(field(j, path, "row_last"), path + "/row_last");
  b.col_first = points(field(j, path, "col_first"), path + "/col_first");
  b.col_last = points(field(j, path, "col_last"), path + "/col_last");
  return b;
}

inline Prescription prescription(const Json& j) {
  Prescription p;
  p.n = integer(field(j, "", "n"), "/n");
  p.mode = parse_prescription_mode(text(field(j, "", "mode"), "/mode"));
  require_mode_degree(p.n, p.mode);
  p.pair = pair(field(j, "", "pair"), "/pair");
  if (p.pair.n != p.n) fail(ErrorCode::Shape, "/pair/n", "disagrees with the prescription degree");
  const bool has_boundary = j.contains("boundary"), has_rings = j.contains("rings");
  switch (p.mode) {
    case PrescriptionMode::DiagonalsOnly:
      if (has_boundary || has_rings) fail(ErrorCode::Shape, "/boundary", "diagonals mode takes no boundary data");
      break;
    case PrescriptionMode::BoundaryAndDiagonals:
      if (has_rings) fail(ErrorCode::Shape, "/rings", "boundary mode takes no ring data");
      p.boundary = boundary(field(j, "", "boundary"), "/boundary");
      break;
    case PrescriptionMode::C1BoundaryAndDiagonals: {
      C1BoundaryData c;
      c.boundary = boundary(field(j, "", "boundary"), "/boundary");
      const Json& rings = field(j, "", "rings");
      c.row_second = points(field(rings, "/rings", "row_second"), "/rings/row_second");
      c.row_penultimate = points(field(rings, "/rings", "row_penultimate"), "/rings/row_penultimate");
      c.col_second = points(field(rings, "/rings", "col_second"), "/rings/col_second");
      c.col_penultimate = points(field(rings, "/rings", "col_penultimate"), "/rings/col_penultimate");
      p.boundary = std::move(c);
      break;
    }
  }
  // Shape and overlap validation.
  const auto slots = prescribed_slots(p.n, p.mode, p.boundary);
  if (!slots.empty() && slots.begin()->second.size() != p.pair.dim())
    fail(ErrorCode::Shape, "/boundary", "boundary and diagonal points differ in dimension");
  return p;
}

inline SolutionSpace solution_space(const Json& j) {
  SolutionSpace s;
  s.n = integer(field(j, "", "n"), "/n");
  s.mode = parse_prescription_mode(text(field(j, "", "mode"), "/mode"));
  require_mode_degree(s.n, s.mode);
  const int dimension = integer(field(j, "", "dimension"), "/dimension");
  s.fill = parse_fill_strategy(text(field(j, "", "fill"), "/fill"));
  s.scale = number(field(j, "", "scale"), "/scale");
  s.pair = pair(field(j, "", "pair"), "/pair");
  if (s.pair.n != s.n) fail(ErrorCode::Shape, "/pair/n", "disagrees with the space degree");
  const Json& prescribed = field(j, "", "prescribed");
  if (!prescribed.is_array()) fail(ErrorCode::Parse, "/prescribed", "expected an array");
  for (std::size_t e = 0; e < prescribed.size(); ++e) {
    const std::string path = "/prescribed/" + std::to_string(e);
    s.prescribed[slot(field(prescribed[e], path, "slot"), s.n, path + "/slot")] =
        point(field(prescribed[e], path, "point"), path + "/point");
  }
  const Json& free = field(j, "", "free_slots");
  if (!free.is_array()) fail(ErrorCode::Parse, "/free_slots", "expected an array");
  for (std::size_t e = 0; e < free.size(); ++e) s.free_slots.push_back(slot(free[e], s.n, "/free_slots/" + std::to_string(e)));
  if (dimension != s.dimension()) fail(ErrorCode::Shape, "/dimension", "disagrees with the number of free slots");
  const Json& deps = field(j, "", "dependencies");
  if (!deps.is_array()) fail(ErrorCode::Parse, "/dependencies", "expected an array");
  for (std::size_t e = 0; e < deps.size(); ++e) {
    const std::string path = "/dependencies/" + std::to_string(e);
    Dependency d{slot(field(deps[e], path, "slot"), s.n, path + "/slot"), {}};
    const Json& coeffs = field(deps[e], path, "coeffs");
    if (!coeffs.is_array() || coeffs.size() != s.free_slots.size())
      fail(ErrorCode::Shape, path + "/coeffs", "expected one coefficient per free slot");
    for (std::size_t c = 0; c < coeffs.size(); ++c) d.coeffs.push_back(rational(coeffs[c], path + "/coeffs/" + std::to_string(c)));
    s.dependencies.push_back(std::move(d));
  }
  s.offset = grid(field(j, "", "offset"), s.n, "/offset");
  s.defaults = points(field(j, "", "defaults"), "/defaults");
  if (s.defaults.size() != s.free_slots.size()) fail(ErrorCode::Shape, "/defaults", "expected one point per free slot");
  s.particular = grid(field(j, "", "particular"), s.n, "/particular");
  if (s.offset.dim() != s.pair.dim() || s.particular.dim() != s.pair.dim())
    fail(ErrorCode::Shape, "/offset", "point dimension disagrees with the pair");
  // Every slot is exactly one of prescribed, free or dependent.
  if (s.prescribed.size() + s.free_slots.size() + s.dependencies.size() != static_cast<std::size_t>((s.n + 1) * (s.n + 1)))
    fail(ErrorCode::Shape, "/dependencies", "prescribed, free and dependent slots do not cover the net");
  return s;
}

inline CompatibilityReport report(const Json& j) {
  CompatibilityReport r;
  r.n = integer(field(j, "", "n"), "/n");
  const std::string parity = text(field(j, "", "parity"), "/parity");
  if (parity != "even" && parity != "odd") fail(ErrorCode::Parse, "/parity", "expected even or odd");
  r.parity = parity == "even" ? Parity::Even : Parity::Odd;
  if (r.parity != parity_of(r.n)) fail(ErrorCode::Shape, "/parity", "disagrees with n");
  r.residual_a = point(field(j, "", "residual_a"), "/residual_a");
  r.residual_b = point(field(j, "", "residual_b"), "/residual_b");
  number(field(j, "", "max_residual"), "/max_residual");
  r.scale = number(field(j, "", "scale"), "/scale");
  r.tol = number(field(j, "", "tol"), "/tol");
  const Json& adm = field(j, "", "admissible");
  if (!adm.is_boolean()) fail(ErrorCode::Parse, "/admissible", "expected a boolean");
  r.admissible = adm.get<bool>();
  return r;
}

}  // namespace detail

inline Document from_json(const Json& j) {
  if (!j.is_object()) detail::fail(ErrorCode::Parse, "", "document must be an object");
  const std::string kind = detail::text(detail::field(j, "", "kind"), "/kind");
  const int version = detail::integer(detail::field(j, "", "version"), "/version");
  if (version != kVersion) detail::fail(ErrorCode::Parse, "/version", "unsupported version " + std::to_string(version));
  Document doc;
  if (kind == "net") {
    const int degree = detail::integer(detail::field(j, "", "degree"), "/degree");
    doc.payload = detail::grid(detail::field(j, "", "points"), degree, "/points");
  } else if (kind == "curve") {
    doc.payload = detail::curve(j, "");
  } else if (kind == "diagonal_pair") {
    doc.payload = detail::pair(j, "");
  } else if (kind == "prescription") {
    doc.payload = detail::prescription(j);
  } else if (kind == "solution_space") {
    doc.payload = detail::solution_space(j);
  } else if (kind == "report") {
    doc.payload = detail::report(j);
  } else {
    detail::fail(ErrorCode::Parse, "/kind", "unknown document kind '" + kind + "'");
  }
  return doc;
}

/// Parses and validates a document. Syntax errors report line and column.
inline Document read_document(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    // Recover line/column from the byte offset.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < bytes.size(); ++i) {
      if (bytes[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------
// OBJ export

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

inline void append_vertex(std::string& out, const Point& p) {
  out += "v";
  for (Eigen::Index c = 0; c < 3; ++c) {
    out += ' ';
    append_number(out, p(c));
  }
  out += '\n';
}

}  // namespace detail

/// Triangulated (samples+1)^2 grid of surface points, two triangles per cell,
/// 1-based indices. With `diagonals`, both diagonal curves are appended as
/// polylines ("l" records) sampled at the same parameter density.
inline std::string export_mesh(const ControlNet& net, int samples, bool diagonals = false) {
  if (net.dim() != 3) throw Error(ErrorCode::Shape, "mesh export needs 3-dimensional points");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "mesh export needs samples >= 1");
  const int k = samples;
  std::string out;
  out += "# diagbez mesh\n";
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b)
      detail::append_vertex(out, eval_surface(net, static_cast<double>(a) / k, static_cast<double>(b) / k));
  const int grid = (k + 1) * (k + 1);
  if (diagonals) {
    const auto pair = extract_diagonals(net);
    for (const auto* poly : {&pair.q, &pair.r})
      for (int a = 0; a <= k; ++a) detail::append_vertex(out, eval_curve(*poly, static_cast<double>(a) / k));
  }
  auto idx = [k](int a, int b) { return a * (k + 1) + b + 1; };
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      out += "f " + std::to_string(idx(a, b)) + ' ' + std::to_string(idx(a + 1, b)) + ' ' + std::to_string(idx(a + 1, b + 1)) + '\n';
      out += "f " + std::to_string(idx(a, b)) + ' ' + std::to_string(idx(a + 1, b + 1)) + ' ' + std::to_string(idx(a, b + 1)) + '\n';
    }
  if (diagonals) {
    for (int curve = 0; curve < 2; ++curve) {
      out += "l";
      for (int a = 0; a <= k; ++a) out += ' ' + std::to_string(grid + curve * (k + 1) + a + 1);
      out += '\n';
    }
  }
  return out;
}

}  // namespace diagbez::io
