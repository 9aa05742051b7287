// Prescribe the boundary and both diagonals of a degree 4 patch, then move
// the one free control point and watch the diagonals stay put.

#include <cstdio>

#include "diagbez/constraints.hpp"
#include "diagbez/diagonals.hpp"

using namespace diagbez;

int main() {
  const int n = 4;
  ControlNet net(n, 3);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      net(i, j) = Eigen::Vector3d(i / 4.0, j / 4.0, (i - 2) * (j - 2) / 8.0);

  const DiagonalPair pair = extract_diagonals(net);
  const auto report = check_compatibility(pair);
  std::printf("pair admissible: %s (max residual %.2e)\n", report.admissible ? "yes" : "no", report.max_residual());

  const auto space =
      solve_space(build_system(pair, PrescriptionMode::BoundaryAndDiagonals, BoundaryData::from_net(net)));
  std::printf("free control points: %d\n", space.dimension());
  for (const auto& s : space.free_slots) std::printf("  %s\n", to_string(s).c_str());

  for (double lift : {-0.5, 0.0, 0.5}) {
    const ControlNet p = realize(space, {{{1, 2}, Eigen::Vector3d(0.25, 0.5, lift)}});
    const auto off = eval_surface(p, 0.25, 0.5);
    const auto d = extract_diagonals(p);
    double drift = 0.0;
    for (std::size_t k = 0; k < d.q.points().size(); ++k)
      drift = std::max({drift, (d.q[k] - pair.q[k]).norm(), (d.r[k] - pair.r[k]).norm()});
    std::printf("P12.z = %+.2f  P22.z = %+.4f  x(1/4,1/2).z = %+.4f  diagonal drift %.1e\n", lift,
                p(2, 2)(2), off(2), drift);
  }

  // An inadmissible pair and its three repairs.
  DiagonalPair bad = pair;
  bad.q[3] += Eigen::Vector3d(0, 0, 0.1);
  std::printf("perturbed pair admissible: %s\n", check_compatibility(bad).admissible ? "yes" : "no");
  for (RepairMode mode : {RepairMode::Central, RepairMode::Elevate, RepairMode::Project}) {
    const auto fixed = repair(bad, mode);
    std::printf("  %-8s -> n=%d admissible: %s\n", std::string(to_string(mode)).c_str(), fixed.n,
                check_compatibility(fixed).admissible ? "yes" : "no");
  }
  return 0;
}
