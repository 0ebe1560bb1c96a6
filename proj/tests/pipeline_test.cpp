#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "nazx/pipeline.hpp"
#include "test_support.hpp"

namespace nazx {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("nazx_pipeline_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

const char* kHeader = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

TEST(RunPipeline, EmptyCircuitCostsNothing) {
  for (Pipeline p : all_pipelines()) {
    auto r = run_pipeline(Circuit(3), p);
    EXPECT_EQ(r.counts.gr_pulses, 0);
    EXPECT_EQ(r.counts.rz_layers, 0);
    EXPECT_TRUE(r.counts.ncp.empty());
    EXPECT_EQ(r.time_ms, 0.0);
  }
}

TEST(RunPipeline, ToffoliStaysNativeWithoutDecomposition) {
  TempDir dir;
  auto f = dir.write("toffoli.qasm", std::string(kHeader) + "qreg q[3];\nccx q[0],q[1],q[2];\n");
  PipelineOptions opt;
  opt.verify = true;
  auto r = run_pipeline_file(f, Pipeline::NoDecomp, opt);
  EXPECT_EQ(r.gates, (std::map<std::string, int>{{"h", 2}, {"ncz", 1}}));
  EXPECT_EQ(r.counts.ncp, (std::map<int, int>{{3, 1}}));
  EXPECT_EQ(r.counts.gr_pulses, 4);
  EXPECT_EQ(r.verified, std::optional<bool>(true));
  EXPECT_EQ(r.file, "toffoli.qasm");
}

TEST(RunPipeline, RandomCircuitsVerifyInEveryPipeline) {
  std::mt19937_64 rng(17);
  PipelineOptions opt;
  opt.verify = true;
  for (int trial = 0; trial < 12; ++trial) {
    Circuit c = testkit::random_circuit(rng, 2 + trial % 5, 30);
    for (Pipeline p : all_pipelines()) {
      auto r = run_pipeline(c, p, opt);
      EXPECT_EQ(r.verified, std::optional<bool>(true)) << trial << " " << pipeline_name(p);
      EXPECT_DOUBLE_EQ(r.time_ms, execution_time(r.sched.ops) * 1e3);
    }
  }
}

TEST(RunPipeline, VerificationSkippedAboveBound) {
  PipelineOptions opt;
  opt.verify = true;
  opt.verify_max_qubits = 3;
  auto r = run_pipeline(qft_circuit(4), Pipeline::ZxDefault, opt);
  EXPECT_FALSE(r.verified);
  EXPECT_TRUE(r.to_json()["verified"].is_null());
}

TEST(RunPipeline, QftWithInsertBeatsDefault) {
  auto d = run_pipeline(qft_circuit(10), Pipeline::ZxDefault);
  auto w = run_pipeline(qft_circuit(10), Pipeline::ZxWithInsert);
  EXPECT_LT(w.counts.gr_pulses, d.counts.gr_pulses);
  EXPECT_LT(w.time_ms, d.time_ms);
}

TEST(RunPipeline, MaxCtrlIsHonoured) {
  Circuit c(4);
  c.add(Gate::ncp({0, 1, 2, 3}, Phase(1, 3))).add(Gate::h(2)).add(Gate::ncz({0, 1, 3}));
  PipelineOptions opt;
  opt.verify = true;
  opt.max_ctrl = 1;
  auto r = run_pipeline(c, Pipeline::ZxWithInsert, opt);
  for (const auto& [arity, n] : r.counts.ncp) EXPECT_LE(arity, 2);
  EXPECT_EQ(r.verified, std::optional<bool>(true));
}

TEST(RunPipeline, ErrorKinds) {
  TempDir dir;
  auto bad = dir.write("bad.qasm", std::string(kHeader) + "qreg q[2];\ncx q[0] q[1];\n");
  auto unsup = dir.write("if.qasm", std::string(kHeader) +
                                        "qreg q[1];\ncreg c[1];\nif(c==1) x q[0];\n");
  try {
    run_pipeline_file(bad, Pipeline::ZxDefault);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), "parse");
  }
  try {
    run_pipeline_file(unsup, Pipeline::ZxDefault);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), "unsupported");
  }
  try {
    run_pipeline_file(dir.path() / "missing.qasm", Pipeline::ZxDefault);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), "io");
    auto rec = error_record("missing.qasm", Pipeline::ZxDefault, e);
    EXPECT_EQ(rec["error"]["kind"], "io");
    EXPECT_EQ(rec["pipeline"], "zx-default");
  }
}

TEST(RunPipeline, ReportTimeMatchesSerializedSchedule) {
  std::mt19937_64 rng(4);
  auto r = run_pipeline(testkit::random_circuit(rng, 5, 40), Pipeline::ZxWithInsert);
  auto s = Schedule::from_json(nlohmann::json::parse(r.sched.to_json().dump()));
  EXPECT_DOUBLE_EQ(s.total_time * 1e3, r.time_ms);
}

class SuiteTest : public ::testing::Test {
 protected:
  void SetUp() override {
    files_.push_back(dir_.write("c_ghz.qasm", std::string(kHeader) +
                                                  "qreg q[3];\nh q[0];\ncx q[0],q[1];\n"
                                                  "cx q[1],q[2];\n"));
    files_.push_back(dir_.write("a_qft3.qasm", std::string(kHeader) +
                                                   "qreg q[3];\nh q[2];\ncp(pi/2) q[1],q[2];\n"
                                                   "cp(pi/4) q[0],q[2];\nh q[1];\n"
                                                   "cp(pi/2) q[0],q[1];\nh q[0];\n"));
    files_.push_back(dir_.write("b_tof.qasm", std::string(kHeader) +
                                                  "qreg q[3];\nh q[0];\nccx q[0],q[1],q[2];\n"
                                                  "t q[2];\n"));
  }
  TempDir dir_;
  std::vector<fs::path> files_;
};

TEST_F(SuiteTest, OneRowPerFileAndPipeline) {
  auto s = run_suite(files_, {Pipeline::ZxDefault, Pipeline::NoDecomp});
  ASSERT_EQ(s.rows.size(), 6u);
  EXPECT_EQ(s.rows[0].file, "a_qft3.qasm");
  EXPECT_EQ(s.rows[0].pipeline, Pipeline::ZxDefault);
  EXPECT_EQ(s.rows[1].pipeline, Pipeline::NoDecomp);
  EXPECT_EQ(s.rows[5].file, "c_ghz.qasm");
  for (const auto& r : s.rows) EXPECT_TRUE(r.report);
  auto j = suite_to_json(s);
  EXPECT_EQ(j["rows"].size(), 6u);
  EXPECT_EQ(j["aggregate"]["baseline"], "zx-default");
  EXPECT_EQ(j["aggregate"]["pipelines"]["no-decomp"]["files"], 3);
  const auto csv = suite_to_csv(s);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 6 + 1);
  EXPECT_EQ(csv.rfind("file,pipeline,gr_pulses,gr_layers,rz_layers,ncp2,ncp3,time_ms", 0), 0u);
  EXPECT_NE(suite_to_table(s).find("mean reduction"), std::string::npos);
}

TEST_F(SuiteTest, RerunIsIdenticalApartFromRuntime) {
  SuiteOptions serial, parallel;
  parallel.jobs = 3;
  auto a = suite_to_json(run_suite(files_, all_pipelines(), serial));
  auto b = suite_to_json(run_suite(files_, all_pipelines(), parallel));
  for (auto* j : {&a, &b}) {
    for (auto& row : (*j)["rows"]) row.erase("runtime_s");
  }
  EXPECT_EQ(a.dump(), b.dump());
}

TEST_F(SuiteTest, AggregateMatchesHandComputation) {
  std::vector<fs::path> two{files_[0], files_[2]};
  auto s = run_suite(two, {Pipeline::ZxDefault, Pipeline::ZxWithInsert});
  double expected = 0;
  for (const auto& f : two) {
    auto base = run_pipeline_file(f, Pipeline::ZxDefault).time_ms;
    auto with = run_pipeline_file(f, Pipeline::ZxWithInsert).time_ms;
    expected += (1.0 - with / base) / 2;
  }
  EXPECT_NEAR(s.mean_reduction.at("zx-with-insert"), expected, 1e-15);
  EXPECT_EQ(s.mean_reduction.at("zx-default"), 0.0);
}

TEST_F(SuiteTest, ErrorsAreRecordedAndSuiteContinues) {
  files_.push_back(dir_.write("d_broken.qasm", "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n"));
  auto s = run_suite(files_, {Pipeline::NoDecomp});
  ASSERT_EQ(s.rows.size(), 4u);
  EXPECT_FALSE(s.rows[3].report);
  ASSERT_TRUE(s.rows[3].error);
  EXPECT_EQ((*s.rows[3].error)["file"], "d_broken.qasm");
  EXPECT_TRUE(s.rows[2].report);
  EXPECT_NE(suite_to_csv(s).find("d_broken.qasm,no-decomp"), std::string::npos);
}

TEST(QftCircuit, MatchesFourierMatrix) {
  for (int n = 1; n <= 4; ++n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd f(dim, dim);
    // qubit 0 is the least significant bit; without swaps the output bits are
    // reversed
    auto rev = [&](Eigen::Index y) {
      Eigen::Index r = 0;
      for (int b = 0; b < n; ++b) {
        if (y >> b & 1) r |= Eigen::Index{1} << (n - 1 - b);
      }
      return r;
    };
    for (Eigen::Index y = 0; y < dim; ++y) {
      for (Eigen::Index x = 0; x < dim; ++x) {
        f(rev(y), x) = expi(2 * M_PI * static_cast<double>(x * y) / static_cast<double>(dim));
      }
    }
    EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(qft_circuit(n)), f, 1e-10)) << n;
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index y = 0; y < dim; ++y) g.row(y) = f.row(rev(y));
    EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(qft_circuit(n, true)), g, 1e-10)) << n;
  }
}

}  // namespace
}  // namespace nazx
