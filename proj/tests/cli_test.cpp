#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "epochsa/cli.hpp"
#include "epochsa/config.hpp"
#include "epochsa/report.hpp"

namespace epochsa {
namespace {

namespace fs = std::filesystem;

const char* kMinimalConfig = R"(# least squares, FASA
[problem]
kind = least_squares
d = 4
B = 2
a = 0.3
seed = 1

[solver]
algorithm = fasa
alpha = 2

[experiment]
budget_grid = 16, 64, 256
trials = 100
base_seed = 7
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(EPOCHSA_TEST_TMP) / "cli_scratch";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run_command(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

TEST(ParseConfig, MinimalConfig) {
  const ParseResult r = parse_config(kMinimalConfig);
  ASSERT_TRUE(r.ok()) << (r.errors.empty() ? "" : r.errors.front());
  const ConfigFile& c = *r.config;
  EXPECT_EQ(c.problem.kind, ProblemKind::LeastSquares);
  EXPECT_EQ(c.problem.d, 4u);
  EXPECT_EQ(c.problem.D, Vector(4, 1.0));
  EXPECT_EQ(c.problem.a, 0.3);
  EXPECT_EQ(c.solver.algorithm, Algorithm::FASA);
  EXPECT_EQ(c.solver.alpha, 2.0);
  EXPECT_EQ(c.experiment.budget_grid, (std::vector<std::size_t>{16, 64, 256}));
  EXPECT_EQ(c.experiment.trials, 100u);
  EXPECT_EQ(c.experiment.base_seed, 7u);
}

TEST(ParseConfig, AlphaOneNamesTheRequirement) {
  std::string text = kMinimalConfig;
  text.replace(text.find("alpha = 2"), 9, "alpha = 1");
  const ParseResult r = parse_config(text);
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].find("requires alpha > 1"), std::string::npos) << r.errors[0];
  EXPECT_NE(r.errors[0].find("line 11"), std::string::npos) << r.errors[0];
}

TEST(ParseConfig, DuplicateKeyListsLines) {
  std::string text = kMinimalConfig;
  text += "[problem]\nd = 5\n";
  const ParseResult r = parse_config(text);
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].find("duplicate key 'd'"), std::string::npos) << r.errors[0];
  EXPECT_NE(r.errors[0].find("line 18"), std::string::npos) << r.errors[0];
  EXPECT_NE(r.errors[0].find("line 4"), std::string::npos) << r.errors[0];
}

TEST(ParseConfig, CollectsEveryError) {
  const char* text = R"([problem]
kind = least_squares
d = 4
B = -1
colour = blue
[solver]
algorithm = fasa
alpha = 0.5
beta = 3
[experiment]
budget_grid = 64, 16
[extras]
)";
  const ParseResult r = parse_config(text);
  ASSERT_FALSE(r.ok());
  auto mentions = [&](const std::string& s) {
    for (const auto& e : r.errors) {
      if (e.find(s) != std::string::npos) return true;
    }
    return false;
  };
  EXPECT_TRUE(mentions("unknown key 'colour'"));
  EXPECT_TRUE(mentions("problem.B"));
  EXPECT_TRUE(mentions("alpha > 1"));
  EXPECT_TRUE(mentions("solver.beta: not used"));
  EXPECT_TRUE(mentions("strictly increasing"));
  EXPECT_TRUE(mentions("experiment.trials: missing"));
  EXPECT_TRUE(mentions("unknown section [extras]"));
  EXPECT_GE(r.errors.size(), 7u);
}

TEST(ParseConfig, FixedStepMustBeBelowInverseLambda) {
  const char* text = R"([problem]
kind = least_squares
d = 4
B = 2
[solver]
algorithm = fixed_sgd
gamma = 2.5
[experiment]
budget_grid = 100
trials = 3
)";
  const ParseResult r = parse_config(text);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.errors[0].find("gamma < 1/lambda"), std::string::npos);
}

TEST(ParseConfig, LogisticAndStartPolicies) {
  const char* text = R"([problem]
kind = logistic
d = 2
B = 2
mu = 0.05
pool_size = 1000
f_star_draws = 1000
[solver]
algorithm = epoch_gd_f
beta = 3
w0 = 0.5, -0.5
[experiment]
budget_grid = 100
trials = 3
[output]
verbosity = 0
)";
  const ParseResult r = parse_config(text);
  ASSERT_TRUE(r.ok()) << r.errors.front();
  EXPECT_EQ(r.config->problem.kind, ProblemKind::Logistic);
  EXPECT_EQ(r.config->solver.start, StartPolicy::Explicit);
  EXPECT_EQ(r.config->solver.explicit_start, (Vector{0.5, -0.5}));
  const ProblemSpec spec = build_problem(r.config->problem);
  EXPECT_DOUBLE_EQ(spec.certificate().lambda, 0.05);
}

TEST(Csv, RoundTripsExactly) {
  Rng rng(5);
  std::vector<ResultRow> rows;
  for (int i = 0; i < 200; ++i) {
    ResultRow r;
    r.algorithm = i % 2 ? "fasa" : "epoch_gd";
    r.T = static_cast<std::size_t>(rng() % 100000);
    r.trials = 1 + rng() % 1000;
    r.mean_excess = std::ldexp(uniform(0.0, 1.0, rng), static_cast<int>(rng() % 200) - 150);
    r.std_error = uniform(0.0, 1.0, rng) / 3.0;
    r.theoretical_rhs = i % 7 == 0 ? std::numeric_limits<double>::infinity()
                                   : uniform(0.0, 1e6, rng);
    r.satisfied = rng() % 2;
    r.k_dagger = rng() % 20;
    r.gradients_consumed = rng() % 100000;
    rows.push_back(r);
  }
  EXPECT_EQ(parse_csv(emit_csv(rows)), rows);

  std::vector<EpochRow> epochs{{"fasa", 10, 0, 0.1, 0.01}, {"fasa", 10, 1, 1.0 / 3.0, 0.0}};
  EXPECT_EQ(parse_epoch_csv(emit_epoch_csv(epochs)), epochs);

  EXPECT_THROW(parse_csv("bogus\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv(std::string(kResultHeader) + "\nfasa,1,2\n"), std::invalid_argument);
}

TEST(RunCommand, RunWritesOneRowPerBudget) {
  const fs::path cfg = write_text("minimal.cfg", kMinimalConfig);
  const fs::path csv = scratch("minimal.csv");
  const Outcome o = run({"run", "--config", cfg.string(), "--out", csv.string()});
  EXPECT_EQ(o.code, 0) << o.err;
  const auto rows = parse_csv(read_text(csv));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].T, 16u);
  EXPECT_EQ(rows[2].T, 256u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.algorithm, "fasa");
    EXPECT_EQ(r.trials, 100u);
    EXPECT_TRUE(r.satisfied);
    EXPECT_LE(r.gradients_consumed, r.T);
  }
  EXPECT_EQ(read_text(csv).substr(0, kResultHeader.size()), kResultHeader);
}

TEST(RunCommand, RunIsByteIdenticalOnRerun) {
  const fs::path cfg = write_text("rerun.cfg", kMinimalConfig);
  const Outcome a = run({"run", "--config", cfg.string(), "--trials", "20"});
  const Outcome b = run({"run", "--config", cfg.string(), "--trials", "20"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const Outcome c = run({"run", "--config", cfg.string(), "--trials", "20", "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST(RunCommand, CheckAssumptionsWithHalvedSmoothness) {
  std::string text = kMinimalConfig;
  text.replace(text.find("seed = 1"), 8, "seed = 1\nL = 1");
  const fs::path cfg = write_text("halved.cfg", text);
  const Outcome o = run({"check-assumptions", "--config", cfg.string(), "--checks", "2000"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.out.find("smoothness,2000,"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find(",false\n"), std::string::npos);
  EXPECT_NE(o.err.find("smoothness"), std::string::npos);

  const fs::path good = write_text("good.cfg", kMinimalConfig);
  const Outcome ok = run({"check-assumptions", "--config", good.string(), "--checks", "2000"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(count_of(ok.out, ",true\n"), 8u);
}

TEST(RunCommand, PlotDrawsOnePolylinePerAlgorithm) {
  const std::string csv = std::string(kResultHeader) +
                          "\nfasa,64,10,0.1,0.01,5,true,3,28\n"
                          "epoch_gd,64,10,0.2,0.01,5,true,3,28\n"
                          "fasa,256,10,0.01,0.001,1,true,6,252\n";
  const fs::path in = write_text("three.csv", csv);
  const fs::path svg = scratch("three.svg");
  const Outcome o = run({"plot", "--csv", in.string(), "--out", svg.string()});
  EXPECT_EQ(o.code, 0) << o.err;
  const std::string text = read_text(svg);
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
  EXPECT_EQ(count_of(text, "<polyline"), 2u);
  EXPECT_NE(text.find("data-algorithm=\"fasa\""), std::string::npos);
  EXPECT_NE(text.find("data-algorithm=\"epoch_gd\""), std::string::npos);
}

TEST(RunCommand, PlotEpochDecay) {
  std::string text = kMinimalConfig;
  text.replace(text.find("algorithm = fasa\nalpha = 2"), 26, "algorithm = epoch_gd_f\nbeta = 2");
  text.replace(text.find("16, 64, 256"), 11, "512, 1280");
  text += "[output]\nepoch_csv = " + scratch("epochs.csv").string() + "\n";
  const fs::path cfg = write_text("epochs.cfg", text);
  const Outcome r = run({"run", "--config", cfg.string(), "--trials", "10", "--out",
                         scratch("epochs_rate.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_epoch_csv(read_text(scratch("epochs.csv")));
  EXPECT_EQ(rows.size(), 5u + 11u);  // 4 and 10 epochs plus the start point
  const Outcome p = run({"plot", "--csv", scratch("epochs_rate.csv").string(), "--out",
                         scratch("rate.svg").string(), "--epochs",
                         scratch("epochs.csv").string(), "--epochs-out",
                         scratch("epochs.svg").string()});
  EXPECT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(count_of(read_text(scratch("epochs.svg")), "<polyline"), 1u);
}

TEST(RunCommand, FitRatePrintsSlopes) {
  const std::string csv = std::string(kResultHeader) +
                          "\nfasa,10,5,0.01,0,1,true,1,1\n"
                          "fasa,100,5,0.0001,0,1,true,1,1\n"
                          "fasa,1000,5,0.000001,0,1,true,1,1\n";
  const fs::path in = write_text("fit.csv", csv);
  const Outcome o = run({"fit-rate", "--csv", in.string()});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.rfind("algorithm,slope,intercept,r_squared,points,dropped\nfasa,", 0), 0u)
      << o.out;
  const double slope = std::stod(o.out.substr(o.out.find("fasa,") + 5));
  EXPECT_NEAR(slope, -2.0, 1e-9);
}

TEST(RunCommand, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"run"}).code, 1);
  EXPECT_EQ(run({"run", "--config", scratch("missing.cfg").string()}).code, 1);
  const fs::path bad = write_text("bad.cfg", "[problem]\nkind = cubic\n");
  const Outcome o = run({"run", "--config", bad.string()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("problem.kind"), std::string::npos);
  EXPECT_TRUE(o.out.empty());
}

TEST(RunCommand, BinaryReportsExitCodes) {
  const fs::path cfg = write_text("binary.cfg", kMinimalConfig);
  const std::string bin = EPOCHSA_CLI_PATH;
  const std::string sink = " > " + scratch("binary.out").string() + " 2>&1";
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + sink).c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("run --config " + cfg.string() + " --trials 5"), 0);
  EXPECT_EQ(status("run"), 1);
  EXPECT_EQ(status("--help"), 0);
}

}  // namespace
}  // namespace epochsa
