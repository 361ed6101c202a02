#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "app.hpp"
#include "csv.hpp"
#include "manifest.hpp"

using namespace catport;
using namespace catport::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "catport");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

double field_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key, 0) == 0) return std::stod(line.substr(key.size()));
  }
  ADD_FAILURE() << key << " missing from\n" << text;
  return 0.0;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("catport-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(Csv, HeaderIsExact) {
  EXPECT_STREQ(kResultHeader,
               "figure,variant,alpha,beta_re,beta_im,xi,tau,N,k_plus,k_minus,loss,outcome,fidelity,avg_fidelity,"
               "probability,branch_count,leakage");
}

TEST(Csv, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.06, 6.617195172490784e-62, -4.0, 1e300}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(4.0), "4");
}

TEST(Csv, AbsentFieldsAreEmpty) {
  ResultRow r;
  r.figure = "3a";
  r.alpha = 4.0;
  r.beta = cplx(0.0, 4.0);
  r.tau = 0.5;
  r.k_plus = 1;
  r.outcome = "+++";
  r.fidelity = 0.9;
  EXPECT_EQ(result_line(r), "3a,1,4,0,4,,0.5,1,1,0,,+++,0.9,,,,");
}

TEST(Manifest, Sha256KnownVector) {
  const auto p = fs::temp_directory_path() / "catport-sha-abc.txt";
  std::ofstream(p) << "abc";
  EXPECT_EQ(sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(p);
}

TEST(Cli, TeleportDefaults) {
  const auto r = invoke({"teleport"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NEAR(field_value(r.out, "fidelity"), 0.95, 0.01);
}

TEST(Cli, TeleportJointParityRealBeta) {
  const auto r = invoke({"teleport", "--variant", "2", "--beta-re", "4", "--beta-im", "0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NEAR(field_value(r.out, "fidelity"), 0.944, 0.005);
}

TEST(Cli, ExitCodes) {
  auto r = invoke({"teleport", "--alpha", "0"});
  EXPECT_EQ(r.code, kInvalidConfig);
  EXPECT_NE(r.err.find("alpha"), std::string::npos);
  EXPECT_EQ(invoke({"teleport", "--variant", "3"}).code, kInvalidConfig);
  EXPECT_EQ(invoke({"teleport", "--xi", "2", "--tau", "0.1"}).code, kInvalidConfig);
  EXPECT_EQ(invoke({"teleport", "--outcomes", "+x"}).code, kInvalidConfig);
  EXPECT_EQ(invoke({"sweep", "--figure", "12"}).code, kInvalidConfig);
  EXPECT_EQ(invoke({}).code, kInvalidConfig);
  r = invoke({"teleport", "--cutoffs", "30,30,30"});
  EXPECT_EQ(r.code, kCutoffTooSmall);
  EXPECT_NE(r.err.find("cutoff-too-small"), std::string::npos);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(Cli, ReadoutSignInOutcomes) {
  const auto plus = invoke({"teleport", "--outcomes", "+,+,+"});
  const auto minus = invoke({"teleport", "--outcomes", "+,+,-"});
  ASSERT_EQ(minus.code, kOk) << minus.err;
  EXPECT_NE(minus.out.find("outcome            ++-"), std::string::npos);
  EXPECT_NE(field_value(plus.out, "fidelity"), field_value(minus.out, "fidelity"));
  EXPECT_EQ(invoke({"teleport", "--kplus", "5", "--outcomes", "++-"}).code, kInvalidConfig);
}

TEST(Cli, ValidateFast) {
  const auto r = invoke({"validate", "--level", "fast"});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_NE(r.out.find("ok     engine-equivalence"), std::string::npos);
}

TEST(Cli, ValidateNamesInjectedFault) {
  const auto r = invoke({"validate", "--fault-bs-sign"});
  EXPECT_EQ(r.code, kValidateFailed);
  EXPECT_NE(r.err.find("validation failed: engine-equivalence"), std::string::npos);
}

TEST_F(TempDir, SweepIsByteStableAcrossJobs) {
  const auto a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(invoke({"sweep", "--figure", "5b", "--out", a.string(), "--jobs", "1"}).code, kOk);
  ASSERT_EQ(invoke({"sweep", "--figure", "5b", "--out", b.string(), "--jobs", "4"}).code, kOk);
  const auto text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultHeader);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 34);
}

TEST_F(TempDir, ManifestListsChecksums) {
  const auto a = dir_ / "a.csv";
  const auto t = dir_ / "t.csv";
  ASSERT_EQ(invoke({"sweep", "--figure", "dist", "--out", a.string()}).code, kOk);
  ASSERT_EQ(invoke({"teleport", "--out", t.string()}).code, kOk);
  const auto m = nlohmann::json::parse(slurp(dir_ / "manifest.json"));
  EXPECT_EQ(m["schema"], kManifestSchema);
  EXPECT_TRUE(m.contains("timestamp"));
  EXPECT_EQ(m["outputs"]["a.csv"]["sha256"], sha256_file(a));
  EXPECT_EQ(m["outputs"]["t.csv"]["sha256"], sha256_file(t));
  EXPECT_EQ(m["outputs"]["a.csv"]["config"]["figure"], "dist");
  EXPECT_EQ(slurp(a).substr(0, slurp(a).find('\n')), kDistHeader);
}

TEST_F(TempDir, ConfigFileWithFlagOverride) {
  const auto cfg = dir_ / "run.cfg";
  std::ofstream(cfg) << "# working point\nalpha = 3\nbeta-im = 3\nxi = 2.17\n";
  const auto from_file = invoke({"teleport", "--config", cfg.string()});
  ASSERT_EQ(from_file.code, kOk) << from_file.err;
  EXPECT_NEAR(field_value(from_file.out, "fidelity"), 0.9126544, 1e-6);
  const auto overridden = invoke({"teleport", "--config", cfg.string(), "--alpha", "4", "--beta-im", "4", "--xi", "2"});
  EXPECT_NEAR(field_value(overridden.out, "fidelity"), field_value(invoke({"teleport"}).out, "fidelity"), 0.0);
  std::ofstream(cfg) << "no-such-key = 1\n";
  EXPECT_EQ(invoke({"teleport", "--config", cfg.string()}).code, kInvalidConfig);
}

TEST_F(TempDir, JobsFromEnvironment) {
  const std::vector<std::string> args = {"sweep", "--figure", "4a", "--xi-min", "2", "--xi-max", "2.1"};
  auto with_out = [&](const fs::path& p) {
    auto a = args;
    a.push_back("--out");
    a.push_back(p.string());
    return a;
  };
  ::setenv("CATPORT_JOBS", "3", 1);
  const auto r = invoke(with_out(dir_ / "env.csv"));
  ::unsetenv("CATPORT_JOBS");
  ASSERT_EQ(r.code, kOk) << r.err;
  ASSERT_EQ(invoke(with_out(dir_ / "serial.csv")).code, kOk);
  EXPECT_EQ(slurp(dir_ / "env.csv"), slurp(dir_ / "serial.csv"));
}
