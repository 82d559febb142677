#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "freqkf/cli.hpp"
#include "freqkf/io.hpp"
#include "freqkf/kalman.hpp"
#include "freqkf/spectral.hpp"
#include "freqkf/synth.hpp"

using namespace freqkf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("freqkf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string slurp(const std::string& name) const { return io::read_text_file(dir_ / name); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"synth"}).code, cli::kUsage);
  EXPECT_EQ(run({"synth", "--kind", "spline", "--out", path("m.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"synth", "--frames", "0", "--out", path("m.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"synth", "--noise-ratio", "0.5", "--noise-sigma", "1", "--out", path("m.json")}).code,
            cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const std::vector<std::string> args = {"synth", "--kind", "sinusoid_mix", "--frames", "60", "--joints", "15",
                                         "--seed", "7", "--out", path("m.json")};
  ASSERT_EQ(run(args).code, cli::kOk);
  const std::string first = slurp("m.json");
  ASSERT_EQ(run(args).code, cli::kOk);
  EXPECT_EQ(slurp("m.json"), first);
  const MotionSequence m = io::read_motion(path("m.json"));
  EXPECT_EQ(m.frames(), 60u);
  EXPECT_EQ(m.joints(), 15u);
}

TEST_F(CliTest, SynthSidecarReportsRatio) {
  ASSERT_EQ(run({"synth", "--seed", "3", "--noise-ratio", "0.5", "--out", path("m.json")}).code, cli::kOk);
  const io::json side = io::json::parse(slurp("m.rho.json"));
  ASSERT_EQ(side["channels"].size(), 51u);
  for (const auto& c : side["channels"]) EXPECT_NEAR(c["rho"].get<double>(), 0.5, 1e-6);
  const MotionSequence noisy = io::read_motion(path("m.noisy.json"));
  const auto spec = dct(channel_series(noisy, 4, Axis::y));
  EXPECT_NEAR(high_freq_ratio(spec, 10, true, 1e-8), 0.5, 1e-6);
}

TEST_F(CliTest, WriteFailureIsIo) {
  EXPECT_EQ(run({"synth", "--out", path("no/such/dir/m.json")}).code, cli::kIo);
}

TEST_F(CliTest, RefineBandLimitedPassesThrough) {
  ASSERT_EQ(run({"synth", "--seed", "4", "--out", path("clean.csv")}).code, cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("clean.csv"), "--output", path("out.csv")}).code, cli::kOk);
  const MotionSequence a = io::read_motion(path("clean.csv"));
  const MotionSequence b = io::read_motion(path("out.csv"));
  for (std::size_t i = 0; i < a.data().size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-9);
  ASSERT_EQ(run({"refine", "--input", path("clean.csv"), "--output", path("id.csv"), "--mode", "fixed-suppress",
                 "--gamma", "1.0"})
                .code,
            cli::kOk);
  const MotionSequence c = io::read_motion(path("id.csv"));
  for (std::size_t i = 0; i < a.data().size(); ++i) EXPECT_NEAR(a.data()[i], c.data()[i], 1e-12);
}

TEST_F(CliTest, RefineReportShowsAdaptiveParameters) {
  ASSERT_EQ(run({"synth", "--seed", "5", "--noise-ratio", "0.5", "--out", path("m.json")}).code, cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("r.json"), "--report",
                 path("rep.json"), "--report-csv", path("rep.csv")})
                .code,
            cli::kOk);
  const io::json rep = io::json::parse(slurp("rep.json"));
  EXPECT_EQ(rep["config"]["mode"], "adaptive");
  EXPECT_FALSE(rep.contains("timing"));
  for (const auto& c : rep["channels"]) {
    EXPECT_NEAR(c["snr_est"].get<double>(), 1.0, 1e-5);
    EXPECT_NEAR(c["r"].get<double>(), 6.67e-3, 1e-5);
  }
  EXPECT_EQ(slurp("rep.csv").substr(0, 15), "joint,axis,rho,");
}

TEST_F(CliTest, ConfigEchoReplays) {
  ASSERT_EQ(run({"synth", "--seed", "6", "--noise-ratio", "0.3", "--out", path("m.json")}).code, cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("a.json"), "--mode", "fixed-kalman",
                 "--k0", "7", "--q0", "2e-6", "--exclude-dc", "--report", path("rep.json")})
                .code,
            cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("b.json"), "--config",
                 path("rep.json"), "--report", path("rep2.json")})
                .code,
            cli::kOk);
  EXPECT_EQ(slurp("a.json"), slurp("b.json"));
  EXPECT_EQ(slurp("rep.json"), slurp("rep2.json"));
  const io::json rep = io::json::parse(slurp("rep.json"));
  EXPECT_EQ(rep["config"]["include_dc"], false);
  EXPECT_EQ(rep["config"]["k0"], 7);
}

TEST_F(CliTest, RefineIsThreadIndependent) {
  ASSERT_EQ(run({"synth", "--seed", "8", "--noise-ratio", "0.5", "--out", path("m.json")}).code, cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("a.json"), "--report",
                 path("ra.json"), "--threads", "1"})
                .code,
            cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("b.json"), "--report",
                 path("rb.json"), "--threads", "0"})
                .code,
            cli::kOk);
  EXPECT_EQ(slurp("a.json"), slurp("b.json"));
  EXPECT_EQ(slurp("ra.json"), slurp("rb.json"));
}

TEST_F(CliTest, RefineErrors) {
  EXPECT_EQ(run({"refine", "--input", path("missing.json"), "--output", path("o.json")}).code, cli::kIo);
  io::write_text_file(path("bad.json"), "{not json");
  EXPECT_EQ(run({"refine", "--input", path("bad.json"), "--output", path("o.json")}).code, cli::kIo);
  ASSERT_EQ(run({"synth", "--frames", "8", "--joints", "2", "--out", path("s.json")}).code, cli::kOk);
  EXPECT_EQ(run({"refine", "--input", path("s.json"), "--output", path("o.json"), "--k0", "9"}).code, cli::kUsage);
  EXPECT_EQ(run({"refine", "--input", path("s.json"), "--output", path("o.json"), "--gamma", "2"}).code,
            cli::kUsage);
  EXPECT_EQ(run({"refine", "--input", path("s.json"), "--output", path("o.json"), "--mode", "smooth"}).code,
            cli::kUsage);
}

TEST_F(CliTest, RefinePlot) {
  ASSERT_EQ(run({"synth", "--seed", "9", "--noise-ratio", "0.5", "--out", path("m.json")}).code, cli::kOk);
  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("r.json"), "--plot", path("p.svg"),
                 "--plot-joint", "3", "--plot-reference", path("m.json")})
                .code,
            cli::kOk);
  const std::string svg = slurp("p.svg");
  EXPECT_NE(svg.find("#2ca02c"), std::string::npos);
  EXPECT_NE(svg.find("joint 3 z"), std::string::npos);
}

TEST_F(CliTest, EvaluateFixtures) {
  ASSERT_EQ(run({"synth", "--seed", "10", "--out", path("gt.json")}).code, cli::kOk);
  fs::create_directories(dir_ / "preds");
  fs::copy_file(path("gt.json"), dir_ / "preds" / "a.json");
  fs::copy_file(path("gt.json"), dir_ / "preds" / "b.json");
  fs::create_directories(dir_ / "mm");
  fs::copy_file(path("gt.json"), dir_ / "mm" / "gt.json");
  const Result r = run({"evaluate", "--pred-dir", path("preds"), "--gt", path("gt.json"), "--mm-gt-dir", path("mm"),
                        "--metrics", "ade,fde,apd,mmade,mmfde", "--out", path("rep.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const io::json rep = io::json::parse(slurp("rep.json"));
  EXPECT_EQ(rep["metrics"]["ade"], 0.0);
  EXPECT_EQ(rep["metrics"]["fde"], 0.0);
  EXPECT_EQ(rep["metrics"]["apd"], 0.0);
  EXPECT_EQ(rep["metrics"]["mmade"], rep["metrics"]["ade"]);
  EXPECT_EQ(rep["samples"], 2);

  const Result only = run({"evaluate", "--pred-dir", path("preds"), "--gt", path("gt.json"), "--metrics", "fde"});
  ASSERT_EQ(only.code, cli::kOk);
  const io::json o = io::json::parse(only.out);
  EXPECT_FALSE(o["metrics"].contains("ade"));
  EXPECT_TRUE(o["metrics"].contains("fde"));
}

TEST_F(CliTest, EvaluateClustering) {
  for (const char* sub : {"preds", "mm/past", "mm/future"}) fs::create_directories(dir_ / sub);
  ASSERT_EQ(run({"synth", "--seed", "11", "--frames", "20", "--out", path("mm/past/0.json")}).code, cli::kOk);
  ASSERT_EQ(run({"synth", "--seed", "12", "--frames", "20", "--out", path("mm/past/1.json")}).code, cli::kOk);
  ASSERT_EQ(run({"synth", "--seed", "13", "--out", path("mm/future/0.json")}).code, cli::kOk);
  ASSERT_EQ(run({"synth", "--seed", "14", "--out", path("mm/future/1.json")}).code, cli::kOk);
  for (auto& e : fs::directory_iterator(dir_ / "mm/past")) {
    if (e.path().string().find(".rho.") != std::string::npos) fs::remove(e.path());
  }
  for (auto& e : fs::directory_iterator(dir_ / "mm/future")) {
    if (e.path().string().find(".rho.") != std::string::npos) fs::remove(e.path());
  }
  fs::copy_file(path("mm/future/1.json"), dir_ / "preds" / "p.json");
  const std::vector<std::string> base = {"evaluate", "--pred-dir", path("preds"), "--mm-gt-dir", path("mm"),
                                         "--past", path("mm/past/1.json"), "--metrics", "mmade"};
  EXPECT_EQ(run(base).code, cli::kUsage);
  std::vector<std::string> args = base;
  args.insert(args.end(), {"--mm-eps", "0"});
  const Result r = run(args);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const io::json rep = io::json::parse(r.out);
  EXPECT_EQ(rep["gt_set_size"], 1);
  EXPECT_EQ(rep["metrics"]["mmade"], 0.0);
}

TEST_F(CliTest, EvaluateShapeMismatch) {
  fs::create_directories(dir_ / "preds");
  ASSERT_EQ(run({"synth", "--frames", "30", "--out", path("preds/a.json")}).code, cli::kOk);
  fs::remove(path("preds/a.rho.json"));
  ASSERT_EQ(run({"synth", "--frames", "40", "--out", path("gt.json")}).code, cli::kOk);
  EXPECT_EQ(run({"evaluate", "--pred-dir", path("preds"), "--gt", path("gt.json")}).code, cli::kShape);
}

TEST_F(CliTest, JitterTable) {
  ASSERT_EQ(run({"synth", "--seed", "15", "--noise-ratio", "0.5", "--out", path("m.json")}).code, cli::kOk);
  const Result same = run({"jitter", "--base", path("m.noisy.json"), "--refined", path("m.noisy.json")});
  ASSERT_EQ(same.code, cli::kOk);
  EXPECT_EQ(same.out.substr(0, 36), "body_part,base,refined,reduction_pct");
  EXPECT_NE(same.out.find("\nAverage,"), std::string::npos);
  std::istringstream lines(same.out);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");

  ASSERT_EQ(run({"refine", "--input", path("m.noisy.json"), "--output", path("r.json")}).code, cli::kOk);
  const Result parts =
      run({"jitter", "--base", path("m.noisy.json"), "--refined", path("r.json"), "--parts-map",
           (fs::path(FREQKF_SOURCE_DIR) / "data/skeleton17_parts.json").string(), "--out", path("j.csv"), "--json",
           path("j.json")});
  ASSERT_EQ(parts.code, cli::kOk) << parts.err;
  const io::json j = io::json::parse(slurp("j.json"));
  EXPECT_EQ(j["rows"].size(), 8u);
  EXPECT_GE(j["mean_reduction_pct"].get<double>(), 20.0);
}

TEST_F(CliTest, JitterShapeMismatch) {
  ASSERT_EQ(run({"synth", "--frames", "30", "--out", path("a.json")}).code, cli::kOk);
  ASSERT_EQ(run({"synth", "--frames", "31", "--out", path("b.json")}).code, cli::kOk);
  EXPECT_EQ(run({"jitter", "--base", path("a.json"), "--refined", path("b.json")}).code, cli::kShape);
}

TEST_F(CliTest, SteadyStatePairs) {
  const Result golden = run({"steady-state", "--q", "1", "--r", "1"});
  ASSERT_EQ(golden.code, cli::kOk);
  std::istringstream in(golden.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "q,r,p_star,k_star");
  const double p = std::stod(row.substr(4, row.find(',', 4) - 4));
  EXPECT_NEAR(p, 0.6180339887, 1e-10);

  const Result tiny = run({"steady-state", "--q", "1e-12", "--r", "1"});
  ASSERT_EQ(tiny.code, cli::kOk);
  EXPECT_NE(tiny.out.find(",9.99999500000"), std::string::npos);

  EXPECT_EQ(run({"steady-state", "--q", "0", "--r", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"steady-state", "--q", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"steady-state"}).code, cli::kUsage);
}

TEST_F(CliTest, SteadyStateSweep) {
  const Result r = run({"steady-state", "--sweep-snr", "0.1:1000:50", "--svg", path("s.svg")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "snr,q,r,p_star,k_star");
  double prev_r = INFINITY;
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    ASSERT_EQ(cols.size(), 5u);
    EXPECT_LT(cols[2], prev_r);
    prev_r = cols[2];
    ++rows;
  }
  EXPECT_EQ(rows, 50);
  EXPECT_NE(slurp("s.svg").find("<polyline"), std::string::npos);
  EXPECT_EQ(run({"steady-state", "--sweep-snr", "1:0.1:5"}).code, cli::kUsage);
  EXPECT_EQ(run({"steady-state", "--sweep-snr", "0.1:10"}).code, cli::kUsage);
  EXPECT_EQ(run({"steady-state", "--sweep-snr", "0.1:10:5", "--r0", "-1"}).code, cli::kUsage);
}

TEST_F(CliTest, CompareTable) {
  ASSERT_EQ(run({"synth", "--seed", "16", "--noise-ratio", "0.5", "--out", path("m.json")}).code, cli::kOk);
  const Result r = run({"compare", "--input", path("m.noisy.json"), "--clean", path("m.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> methods;
  std::getline(in, line);
  EXPECT_EQ(line, "method,gamma,mse,jerk");
  while (std::getline(in, line)) methods.push_back(line.substr(0, line.find(',')));
  ASSERT_EQ(methods.size(), 12u);
  EXPECT_EQ(methods.front(), "raw");
  EXPECT_EQ(std::count(methods.begin(), methods.end(), "fixed_suppress"), 9);
  EXPECT_EQ(methods[10], "fixed_kalman");
  EXPECT_EQ(methods.back(), "adaptive");
}

TEST_F(CliTest, CompareCleanInputFavoursAdaptive) {
  ASSERT_EQ(run({"synth", "--seed", "17", "--out", path("m.json")}).code, cli::kOk);
  const Result r = run({"compare", "--input", path("m.json"), "--clean", path("m.json")});
  ASSERT_EQ(r.code, cli::kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  double adaptive = -1.0;
  std::vector<double> fixed;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols[0] == "adaptive") adaptive = std::stod(cols[2]);
    if (cols[0] == "fixed_suppress") fixed.push_back(std::stod(cols[2]));
  }
  ASSERT_EQ(fixed.size(), 9u);
  // All three sit at DCT round-off on a band-limited input.
  for (double f : fixed) EXPECT_LE(adaptive, f + 1e-24);
}

TEST_F(CliTest, CompareErrors) {
  ASSERT_EQ(run({"synth", "--frames", "30", "--out", path("a.json")}).code, cli::kOk);
  ASSERT_EQ(run({"synth", "--frames", "31", "--out", path("b.json")}).code, cli::kOk);
  EXPECT_EQ(run({"compare", "--input", path("a.json"), "--clean", path("b.json")}).code, cli::kShape);
  EXPECT_EQ(run({"compare", "--input", path("a.json"), "--clean", path("a.json"), "--gammas", "0.1,x"}).code,
            cli::kUsage);
  EXPECT_EQ(run({"compare", "--input", path("a.json"), "--clean", path("a.json"), "--gammas", "1.5"}).code,
            cli::kUsage);
}
