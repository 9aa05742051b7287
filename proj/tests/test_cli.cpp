#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "diagbez/cli.hpp"
#include "test_support.hpp"

namespace diagbez {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) / ("diagbez_cli_" + std::to_string(::getpid()) + "_" +
                                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string put(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, Dims) {
  auto r = run({"dims", "4", "--mode", "boundary"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1\nformula_exempt false\n");
  r = run({"dims", "2", "--mode", "diagonals"});
  EXPECT_EQ(r.out, "1\nformula_exempt false\n");
  r = run({"dims", "2", "--mode", "boundary"});
  EXPECT_EQ(r.out, "0\nformula_exempt true\n");
  r = run({"dims", "3", "--mode", "c1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("mode_degree"), std::string::npos);
}

TEST_F(CliTest, ExtractThenCheckAdmits) {
  Rng rng(1);
  const auto net = put("net.json", io::write_document(rng.net(4)));
  auto r = run({"extract", net, "-o", path("pair.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  r = run({"check", path("pair.json")});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(io::read_document(r.out).as<CompatibilityReport>().admissible);
}

TEST_F(CliTest, CheckRejectsRandomPairWithResiduals) {
  Rng rng(2);
  const auto pair = rng.pair(3, 3, 0.0, 1.0);
  const auto file = put("pair.json", io::write_document(pair));
  const auto r = run({"check", file});
  EXPECT_EQ(r.code, 2);
  const auto rep = io::read_document(r.out).as<CompatibilityReport>();
  EXPECT_FALSE(rep.admissible);
  const auto hand = testing::hand_residuals(pair);
  EXPECT_LT((rep.residual_a - hand.a).norm(), 1e-10);
  EXPECT_LT((rep.residual_b - hand.b).norm(), 1e-10);
  // A huge tolerance admits it.
  EXPECT_EQ(run({"check", file, "--tol", "1e6"}).code, 0);
}

TEST_F(CliTest, RepairModes) {
  Rng rng(3);
  const auto even = put("even.json", io::write_document(rng.pair(2)));
  const auto odd = put("odd.json", io::write_document(rng.pair(3)));
  for (const std::string mode : {"central", "elevate", "project"}) {
    const auto out = path("fixed_" + mode + ".json");
    ASSERT_EQ(run({"repair", even, "--mode", mode, "-o", out}).code, 0);
    EXPECT_EQ(run({"check", out}).code, 0) << mode;
  }
  EXPECT_EQ(run({"repair", odd, "--mode", "elevate"}).code, 1);
  EXPECT_EQ(run({"repair", odd, "--mode", "nearest"}).code, 1);
  EXPECT_EQ(run({"repair", odd}).code, 1);
}

TEST_F(CliTest, SolveRealizeExtractCheck) {
  Rng rng(4);
  const auto net = rng.net(4);
  const Prescription p{4, PrescriptionMode::BoundaryAndDiagonals, extract_diagonals(net), BoundaryData::from_net(net)};
  const auto pres = put("p.json", io::write_document(p));
  auto r = run({"solve", pres, "-o", path("space.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_document(slurp(path("space.json"))).as<SolutionSpace>().dimension(), 1);

  r = run({"realize", path("space.json"), "--free", R"({"1,2": [0.25, -1, 3]})", "-o", path("net.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto realized = io::read_document(slurp(path("net.json"))).as<ControlNet>();
  EXPECT_EQ(realized(1, 2), Point(Eigen::Vector3d(0.25, -1, 3)));
  ASSERT_EQ(run({"extract", path("net.json"), "-o", path("pair.json")}).code, 0);
  EXPECT_EQ(run({"check", path("pair.json")}).code, 0);

  put("free.json", R"({"1,2": [1, 2, 3]})");
  EXPECT_EQ(run({"realize", path("space.json"), "--free", path("free.json")}).code, 0);
  EXPECT_EQ(run({"realize", path("space.json"), "--fill", "coons"}).code, 0);

  r = run({"realize", path("space.json"), "--free", R"({"2,2": [0, 0, 0]})"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown_slot"), std::string::npos) << r.err;
  EXPECT_EQ(run({"realize", path("space.json"), "--free", R"({"1;2": [0, 0, 0]})"}).code, 1);
}

TEST_F(CliTest, SolveRejectsInadmissible) {
  Rng rng(5);
  const Prescription p{3, PrescriptionMode::DiagonalsOnly, rng.pair(3), {}};
  const auto r = run({"solve", put("p.json", io::write_document(p))});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("inadmissible"), std::string::npos);
  EXPECT_NE(r.err.find("residual"), std::string::npos);
}

TEST_F(CliTest, EvalAndMesh) {
  const auto net = put("flat.json", io::write_document(testing::flat_net(3)));
  auto r = run({"eval", net, "--u", "0.25", "--v", "0.5"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.25 0.5 0\n");
  EXPECT_EQ(run({"eval", net, "--u", "1.5", "--v", "0"}).code, 1);

  r = run({"mesh", net, "--samples", "2", "--diagonals"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, run({"mesh", net, "--samples", "2", "--diagonals"}).out);
  EXPECT_NE(r.out.find("\nl "), std::string::npos);
  EXPECT_EQ(run({"mesh", net, "--samples", "0"}).code, 1);
}

TEST_F(CliTest, OperationalErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const auto r = run({"extract", path("missing.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos);
  EXPECT_EQ(run({"check", put("bad.json", "{\"kind\": ")}).code, 1);
  // A net where a pair is expected.
  EXPECT_EQ(run({"check", put("net.json", io::write_document(testing::flat_net(2)))}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

}  // namespace
}  // namespace diagbez
