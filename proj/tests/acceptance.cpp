// Acceptance gate: one PASS/FAIL line per primary criterion, exit status 1 if
// any criterion fails. Tolerances are fixed here, not tuned per run.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "diagbez/cli.hpp"
#include "diagbez/constraints.hpp"
#include "diagbez/diagonals.hpp"
#include "test_support.hpp"

using namespace diagbez;
using testing::Rng;

namespace {

constexpr PrescriptionMode kDiag = PrescriptionMode::DiagonalsOnly;
constexpr PrescriptionMode kBound = PrescriptionMode::BoundaryAndDiagonals;
constexpr PrescriptionMode kC1 = PrescriptionMode::C1BoundaryAndDiagonals;
constexpr PrescriptionMode kModes[] = {kDiag, kBound, kC1};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ConstraintSystem system_from(const ControlNet& net, PrescriptionMode mode) {
  return build_system(extract_diagonals(net), mode, testing::boundary_of(net, mode));
}

Outcome dimension_table() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  auto check = [&](int n, PrescriptionMode mode, int want) {
    const auto sys = structural_system(n, mode);
    const int structural = static_cast<int>(sys.unknowns.size() - system_rank(sys));
    const int solved = solve_space(system_from(rng.net(n), mode)).dimension();
    if (structural != want || solved != want)
      o.fail(std::string(to_string(mode)) + " n=" + std::to_string(n) + ": got " + std::to_string(solved) + "/" +
             std::to_string(structural) + ", want " + std::to_string(want));
  };
  for (int n = 1; n <= 8; ++n) check(n, kDiag, (n - 1) * (n - 1));
  for (int n = 3; n <= 8; ++n) check(n, kBound, (n - 3) * (n - 3));
  for (int n = 5; n <= 8; ++n) check(n, kC1, (n - 5) * (n - 5));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 5.0) o.fail("took " + fmt(secs) + " s");
  if (o.pass) o.detail = "18 cases, " + fmt(secs) + " s";
  return o;
}

Outcome rank_facts() {
  Outcome o;
  for (int n = 1; n <= 8; ++n) {
    const auto sys = structural_system(n, kDiag);
    if (system_rank(sys) != static_cast<std::size_t>(4 * n)) o.fail("full rank n=" + std::to_string(n));
    if (left_nullity(sys) != 2) o.fail("left nullity n=" + std::to_string(n));
  }
  for (int n = 3; n <= 8; ++n)
    if (system_rank(structural_system(n, kBound)) != static_cast<std::size_t>(4 * (n - 2)))
      o.fail("boundary rank n=" + std::to_string(n));
  for (int n = 5; n <= 8; ++n)
    if (system_rank(structural_system(n, kC1)) != static_cast<std::size_t>(4 * (n - 4)))
      o.fail("c1 rank n=" + std::to_string(n));
  if (o.pass) o.detail = "4n / 2 / 4(n-2) / 4(n-4)";
  return o;
}

Outcome closed_forms() {
  Outcome o;
  Rng rng(103);
  double worst = 0.0;
  std::string worst_label;
  using Maker = testing::FormCase (*)(Rng&);
  for (Maker make : {&testing::degree2_case, &testing::degree3_case, &testing::degree3_boundary_case,
                     &testing::degree4_boundary_case, &testing::degree6_c1_case})
    for (int trial = 0; trial < 20; ++trial) {
      const auto c = make(rng);
      for (const auto& check : c.checks) {
        const double rel = (check.expected - check.actual).norm() / std::max(c.scale, 1.0);
        if (rel > worst) {
          worst = rel;
          worst_label = check.label;
        }
      }
    }
  if (worst > 1e-10) o.fail(worst_label + " off by " + fmt(worst));
  o.detail = o.pass ? "worst relative " + fmt(worst) : o.detail;
  return o;
}

Outcome theorem() {
  Outcome o;
  Rng rng(104);
  for (int n = 1; n <= 6; ++n)
    for (int t = 0; t < 200; ++t)
      if (!check_compatibility(extract_diagonals(rng.net(n)), 1e-10).admissible)
        o.fail("extracted pair rejected, n=" + std::to_string(n));

  // Backward direction: admissibility decides solvability. A third of the
  // pairs come from nets, a third are projected random pairs, a third raw.
  int disagreements = 0, admissible = 0, total = 0;
  for (int parity = 0; parity < 2; ++parity)
    for (int t = 0; t < 200; ++t) {
      const int n = parity == 0 ? 2 + 2 * (t % 3) : 1 + 2 * (t % 3);
      DiagonalPair pair;
      switch (t % 3) {
        case 0: pair = extract_diagonals(rng.net(n)); break;
        case 1: pair = project_to_admissible(rng.pair(n)); break;
        default: pair = rng.pair(n); break;
      }
      const bool adm = check_compatibility(pair).admissible;
      bool solved = true;
      try {
        solve_space(assemble_system(pair, kDiag));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Inconsistent) o.fail(std::string("unexpected error ") + e.what());
        solved = false;
      }
      disagreements += adm != solved;
      admissible += adm;
      ++total;
    }
  if (disagreements) o.fail(std::to_string(disagreements) + " disagreements");
  if (o.pass) o.detail = "1200 nets; " + std::to_string(total) + " pairs (" + std::to_string(admissible) + " admissible), 0 disagreements";
  return o;
}

Outcome repair_suite() {
  Outcome o;
  Rng rng(105);
  auto residual_ok = [](const DiagonalPair& p) { return check_compatibility(p, 1e-10).admissible; };
  int trials = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 6;
    const auto pair = rng.pair(n);
    if (check_compatibility(pair).admissible) continue;
    ++trials;
    if (!residual_ok(repair_central(pair))) o.fail("central n=" + std::to_string(n));
    const auto projected = project_to_admissible(pair);
    if (!residual_ok(projected)) o.fail("project n=" + std::to_string(n));
    const double kkt = testing::max_gap(projected, testing::kkt_projection(pair));
    if (kkt > 1e-8) o.fail("KKT gap " + fmt(kkt) + " n=" + std::to_string(n));
    const auto even = rng.pair(2 * (1 + t % 3));
    if (!residual_ok(repair_by_elevation(even))) o.fail("elevate n=" + std::to_string(even.n));
  }
  if (trials < 100) o.fail("only " + std::to_string(trials) + " inadmissible inputs");

  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 6;
    const auto pair = extract_diagonals(rng.net(n));
    const double tol = 1e-12 * testing::scale_of(pair);
    if (testing::max_gap(repair_central(pair), pair) > tol) o.fail("central not idempotent n=" + std::to_string(n));
    if (testing::max_gap(project_to_admissible(pair), pair) > tol) o.fail("project not idempotent n=" + std::to_string(n));
    if (n % 2 == 0) {
      const DiagonalPair up(n + 1, degree_elevate(degree_elevate(pair.q)), degree_elevate(degree_elevate(pair.r)));
      if (testing::max_gap(repair_by_elevation(pair), up) > tol) o.fail("elevate moved an admissible pair");
    }
  }
  if (o.pass) o.detail = "3 x 100 inadmissible inputs, KKT and idempotence";
  return o;
}

Outcome round_trip() {
  Outcome o;
  Rng rng(106);
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n)
    for (PrescriptionMode mode : kModes) {
      if (n < min_degree(mode)) continue;
      for (int t = 0; t < 50; ++t) {
        const auto net = rng.net(n);
        const auto pair = extract_diagonals(net);
        const auto space = solve_space(build_system(pair, mode, testing::boundary_of(net, mode)));
        FreeValues values;
        for (const auto& s : space.free_slots) values[s] = rng.point(3, -3, 3);
        const auto back = extract_diagonals(realize(space, values));
        worst = std::max(worst, testing::max_gap(back, pair) / testing::scale_of(pair));
      }
    }
  if (worst > 1e-10) o.fail("worst relative gap " + fmt(worst));
  if (o.pass) o.detail = "worst relative gap " + fmt(worst);
  return o;
}

Outcome dirichlet_fill() {
  Outcome o;
  double worst_flat = 0.0;
  // Flat prescriptions carry the boundary: diagonals-only spaces can move
  // boundary points and undercut the flat net's energy.
  for (int n = 2; n <= 7; ++n)
    for (PrescriptionMode mode : {kBound, kC1}) {
      if (n < min_degree(mode)) continue;
      const auto flat = testing::flat_net(n);
      worst_flat = std::max(worst_flat, testing::max_gap(solve_space(system_from(flat, mode)).particular, flat));
    }
  if (worst_flat > 1e-10) o.fail("flat net off by " + fmt(worst_flat));

  Rng rng(107);
  double worst_line = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto space = solve_space(system_from(rng.net(4), kBound));
    for (Eigen::Index c = 0; c < 3; ++c)
      worst_line = std::max(worst_line, std::abs(space.defaults.at(0)(c) - testing::line_search_free_value(space, {1, 2}, c)));
  }
  if (worst_line > 1e-8) o.fail("line search off by " + fmt(worst_line));
  if (o.pass) o.detail = "flat " + fmt(worst_flat) + ", line search " + fmt(worst_line);
  return o;
}

Outcome lemma_checks() {
  Outcome o;
  Rng rng(108);
  for (int n = 1; n <= 8; ++n)
    for (int t = 0; t < 20; ++t) {
      const auto pair = t % 2 ? rng.pair(n) : extract_diagonals(rng.net(n));
      const Point gap =
          std::pow(4.0, n) * (testing::bernstein_curve(pair.q, 0.5) - testing::bernstein_curve(pair.r, 0.5));
      if ((midpoint_condition(pair) - gap).norm() > 1e-10 * testing::scale_of(pair))
        o.fail("midpoint n=" + std::to_string(n));
      const auto net = rng.net(n);
      const auto a = extract_diagonals(net), b = extract_diagonals(sign_flip_net(net));
      for (int k = 0; k <= 2 * n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const double sq = k % 2 ? -1.0 : 1.0, sr = (n - k) % 2 ? -1.0 : 1.0;
        if ((b.q[uk] - sq * a.q[uk]).norm() > 1e-12 || (b.r[uk] - sr * a.r[uk]).norm() > 1e-12)
          o.fail("sign flip n=" + std::to_string(n));
      }
    }
  if (o.pass) o.detail = "n=1..8";
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  Outcome o;
  const std::string fixtures = DIAGBEZ_FIXTURES, golden = fixtures + "/golden";
  std::ifstream list(fixtures + "/pipeline.txt");
  if (!list) {
    o.fail("missing pipeline.txt");
    return o;
  }
  int steps = 0;
  std::string line;
  while (std::getline(list, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, code, argline;
    std::getline(fields, name, '|');
    std::getline(fields, code, '|');
    std::getline(fields, argline);
    std::vector<std::string> args;
    std::istringstream words(argline);
    for (std::string w; words >> w;) {
      for (auto [tag, dir] : {std::pair{"@F@", fixtures}, std::pair{"@G@", golden}})
        if (auto at = w.find(tag); at != std::string::npos) w.replace(at, 3, dir);
      args.push_back(w);
    }
    const std::string want = slurp(golden + "/" + name);
    for (int run = 0; run < 2; ++run) {
      std::ostringstream out, err;
      const int exit_code = cli::run(args, out, err);
      if (exit_code != std::stoi(code)) o.fail(name + ": exit " + std::to_string(exit_code));
      if (out.str() != want) o.fail(name + ": differs from golden file");
    }
    ++steps;
  }
  if (steps == 0) o.fail("empty pipeline");
  if (o.pass) o.detail = std::to_string(steps) + " steps x 2 runs byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"dimension-table", dimension_table}, {"rank-facts", rank_facts},     {"closed-forms", closed_forms},
      {"theorem", theorem},                 {"repair-suite", repair_suite}, {"round-trip", round_trip},
      {"dirichlet-fill", dirichlet_fill},   {"lemma-checks", lemma_checks}, {"cli-determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
