#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "relsha/evaluation.hpp"
#include "relsha/ingest.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace relsha;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("relsha_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string data(const std::string& name) { return oracle::data_path(name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run({}), cli::kUsage); }

TEST_F(Cli, HelpSucceeds) {
  EXPECT_EQ(run({"--help"}), cli::kOk);
  EXPECT_NE(out_.str().find("experiment"), std::string::npos);
}

TEST_F(Cli, SynthThenHaFitRecoversSolution) {
  ASSERT_EQ(run({"synth", "--solution", data("synthetic_truth.csv"), "--interval", "1", "--length", "2400", "-o",
                 path("gauge.csv")}),
            cli::kOk)
      << err_.str();
  ASSERT_EQ(run({"fit", "--method", "ha", "--input", path("gauge.csv"), "--catalog", data("noaa37.csv"), "-o",
                 path("ha.csv")}),
            cli::kOk)
      << err_.str();
  const auto& catalog = oracle::standard_catalog();
  const auto fit = load_harmonics(path("ha.csv"), catalog);
  EXPECT_TRUE(fit.warnings.empty());
  EXPECT_EQ(fit.solution.size(), 37u);
  std::ifstream in(path("ha.csv"));
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("constituent_name", 0) == 0) header = true;
    else if (header) ++rows;
  }
  EXPECT_EQ(rows, 37);
  ASSERT_EQ(run({"rrmse", "--estimated", path("ha.csv"), "--truth", data("synthetic_truth.csv")}), cli::kOk);
  EXPECT_LT(std::stod(out_.str()), 1.0);
}

TEST_F(Cli, SynthZeroAmplitudeIsConstant) {
  {
    std::ofstream f(path("flat.csv"));
    f << "# mean_m: 1\nconstituent_name,amplitude_m,phase_deg\nM2,0,0\n";
  }
  ASSERT_EQ(run({"synth", "--solution", path("flat.csv"), "--length", "10", "-o", path("flat_series.csv")}), cli::kOk);
  const auto s = load_water_levels(path("flat_series.csv"));
  EXPECT_EQ(s.size(), 101u);
  for (double h : s.heights()) EXPECT_EQ(h, 1.0);
}

TEST_F(Cli, SynthNoiseIsReproducible) {
  const std::vector<std::string> args{"synth", "--solution", data("synthetic_truth.csv"), "--length", "48",
                                      "--noise", "0.02", "--seed", "3"};
  ASSERT_EQ(run(args), cli::kOk);
  const std::string first = out_.str();
  ASSERT_EQ(run(args), cli::kOk);
  EXPECT_EQ(out_.str(), first);
  EXPECT_NE(first.find("2021-01-01T00:00:00Z"), std::string::npos);
}

TEST_F(Cli, RelshaFitWritesDiagnostics) {
  ASSERT_EQ(run({"synth", "--solution", data("synthetic_truth.csv"), "--interval", "237.6", "--length", "8784", "-o",
                 path("jason.csv")}),
            cli::kOk);
  ASSERT_EQ(run({"fit", "--method", "relsha", "--lambda", "0.5", "--reference", data("reference.csv"), "--input",
                 path("jason.csv"), "--strict"}),
            cli::kOk)
      << err_.str();
  const std::string text = out_.str();
  for (const char* key : {"# objective:", "# iterations:", "# converged: true", "# regime: underdetermined"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST_F(Cli, StrictNonConvergenceExitCode) {
  ASSERT_EQ(run({"synth", "--solution", data("synthetic_truth.csv"), "--interval", "237.6", "--length", "8784", "-o",
                 path("jason.csv")}),
            cli::kOk);
  const std::vector<std::string> args{"fit",          "--method", "relsha", "--reference", data("reference.csv"),
                                      "--input",      path("jason.csv"),    "--max-iterations", "1",
                                      "--gradient-tolerance", "1e-300"};
  EXPECT_EQ(run(args), cli::kOk);
  EXPECT_NE(err_.str().find("did not converge"), std::string::npos);
  auto strict = args;
  strict.push_back("--strict");
  EXPECT_EQ(run(strict), cli::kNotConverged);
}

TEST_F(Cli, ChaWithoutSecondReferenceIsUsageError) {
  EXPECT_EQ(run({"fit", "--method", "cha", "--input", data("synthetic_truth.csv"), "--reference-a",
                 data("reference_a.csv")}),
            cli::kUsage);
}

TEST_F(Cli, UnknownMethodIsUsageError) {
  EXPECT_EQ(run({"fit", "--method", "svd", "--input", "x.csv"}), cli::kUsage);
}

TEST_F(Cli, MissingInputFileFailsWithoutPartialOutput) {
  EXPECT_EQ(run({"fit", "--method", "ha", "--input", path("absent.csv"), "-o", path("out.csv")}), cli::kFailure);
  EXPECT_FALSE(fs::exists(path("out.csv")));
  EXPECT_FALSE(fs::exists(path("out.csv.partial")));
  EXPECT_NE(err_.str().find("io-error"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  ASSERT_EQ(run({"synth", "--solution", data("synthetic_truth.csv"), "--interval", "1", "--length", "1000", "-o",
                 path("gauge.csv")}),
            cli::kOk);
  {
    std::ofstream f(path("relsha.toml"));
    f << "[fit]\nmethod = \"relsha\"\nlambda = 0.25\nreference = \"" << data("reference.csv") << "\"\n";
  }
  ASSERT_EQ(run({"--config", path("relsha.toml"), "fit", "--input", path("gauge.csv")}), cli::kOk) << err_.str();
  EXPECT_NE(out_.str().find("# lambda: 0.25"), std::string::npos);
  ASSERT_EQ(run({"--config", path("relsha.toml"), "fit", "--input", path("gauge.csv"), "--lambda", "0.75"}), cli::kOk);
  EXPECT_NE(out_.str().find("# lambda: 0.75"), std::string::npos);
}

TEST_F(Cli, ResampleSubcommand) {
  ASSERT_EQ(run({"synth", "--solution", data("synthetic_truth.csv"), "--length", "100", "-o", path("dense.csv")}),
            cli::kOk);
  ASSERT_EQ(run({"resample", "--input", path("dense.csv"), "--interval", "1", "--length", "50", "--seed", "4", "-o",
                 path("hourly.csv")}),
            cli::kOk)
      << err_.str();
  EXPECT_EQ(load_water_levels(path("hourly.csv")).size(), 51u);
}

TEST_F(Cli, SingleCellExperiment) {
  ASSERT_EQ(run({"experiment", "--methods", "ha", "--intervals", "0.1", "--lengths", "8784", "--span", "8800", "-o",
                 path("grid.csv")}),
            cli::kOk)
      << err_.str();
  std::istringstream grid(slurp(path("grid.csv")));
  std::string header, row, extra;
  std::getline(grid, header);
  std::getline(grid, row);
  EXPECT_FALSE(std::getline(grid, extra));
  EXPECT_EQ(header, "interval_hours,length_hours,method,sample_count,regime,rrmse_percent");
  EXPECT_LT(std::stod(row.substr(row.rfind(',') + 1)), 0.1);
  EXPECT_TRUE(fs::exists(path("grid_slice_6min.csv")));
}

TEST_F(Cli, ExperimentIsByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::string> base{"experiment", "--intervals", "2,24,237.6", "--lengths", "1440,2880",
                                      "--span",     "4000",        "--seed",     "7"};
  auto with = [&](const std::string& threads, const std::string& out) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "-o", path(out)});
    return run(args);
  };
  ASSERT_EQ(with("1", "a.csv"), cli::kOk) << err_.str();
  ASSERT_EQ(with("1", "b.csv"), cli::kOk);
  ASSERT_EQ(with("4", "c.csv"), cli::kOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("c.csv")));
  EXPECT_EQ(slurp(path("a_slice_9.9d.csv")), slurp(path("c_slice_9.9d.csv")));
  const std::string grid = slurp(path("a.csv"));
  for (const char* m : {",HA,", ",CHA,", ",ReLSHA,"}) EXPECT_NE(grid.find(m), std::string::npos) << m;
}

TEST_F(Cli, LambdaSweepWritesOneBlockPerLambda) {
  ASSERT_EQ(run({"experiment", "--methods", "relsha", "--intervals", "237.6", "--lengths", "8784", "--lambda-sweep",
                 "-o", path("grid.csv")}),
            cli::kOk)
      << err_.str();
  std::istringstream sweep(slurp(path("grid_lambda_sweep.csv")));
  std::string line;
  std::getline(sweep, line);
  EXPECT_EQ(line, "lambda,interval_hours,length_hours,sample_count,regime,rrmse_percent");
  std::vector<std::string> lambdas;
  while (std::getline(sweep, line)) lambdas.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(lambdas, (std::vector<std::string>{"0.1", "0.3", "0.5", "0.7", "0.9"}));
}
