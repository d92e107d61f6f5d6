#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "stc/cli/app.hpp"
#include "stc/cli/commands.hpp"
#include "stc/cli/spec.hpp"

namespace stc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Invocation {
  int code = -1;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("stc_cli_" + std::string(info->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  Invocation run(std::vector<std::string> args, bool with_root = true) {
    args.insert(args.begin(), "stc");
    if (with_root) {
      args.push_back("--output-root");
      args.push_back(root_.string());
    }
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Invocation r;
    r.code = run_app(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static json summary_of(const Invocation& r) {
    std::string path = r.out;
    while (!path.empty() && path.back() == '\n') path.pop_back();
    return json::parse(slurp(path));
  }

  fs::path root_;
};

TEST_F(Cli, VerifyOneDimensional) {
  const Invocation r = run({"verify-1d", "--p", "2", "--alpha", "0.5", "--set", "/options/sweep_cells=0"});
  ASSERT_EQ(r.code, kExitConverged) << r.err;
  const json s = summary_of(r);
  EXPECT_NEAR(s["closed_form"].get<double>(), 10.8696, 5e-5);
  EXPECT_NEAR(s["fem_value"].get<double>(), s["closed_form"].get<double>(), 0.005 * 10.8696);
  EXPECT_TRUE(s["within_tolerance"].get<bool>());
}

TEST_F(Cli, SupercriticalExponentIsRejected) {
  const Invocation r = run({"solve", "--p", "1.5", "--q", "3.5", "--alpha", "0.25"});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("p_*"), std::string::npos);
  EXPECT_TRUE(fs::is_empty(root_));
}

TEST_F(Cli, LargeExponentAcceptedWhenPAtLeastN) {
  const Invocation r = run({"solve", "--p", "2", "--q", "7", "--alpha", "0.25", "--resolution", "0.3"});
  EXPECT_EQ(r.code, kExitConverged) << r.err;
}

TEST_F(Cli, MalformedConfigReportsLine) {
  const fs::path cfg = write_file("bad.json", "{\n  \"command\": \"solve\",\n  \"alpha\": ,\n}\n");
  const Invocation r = run({"solve", "-c", cfg.string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownFieldsAreRejected) {
  const fs::path cfg = write_file("bad.json", R"({"command": "solve", "cfg": {"p": 2, "r": 1}})");
  Invocation r = run({"solve", "-c", cfg.string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("/cfg/r"), std::string::npos);
  r = run({"solve", "--alpha", "0.2", "--set", "/options/strategy=\"combined\""});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("/options/strategy"), std::string::npos);
  r = run({"solve", "--bogus"});
  EXPECT_EQ(r.code, kExitInvalid);
}

TEST_F(Cli, ConfigCommandMustMatch) {
  const fs::path cfg = write_file("spec.json", R"({"command": "optimize", "alpha": 0.2})");
  EXPECT_EQ(run({"solve", "-c", cfg.string()}).code, kExitInvalid);
}

TEST_F(Cli, SolveWritesTheDocumentedFiles) {
  const fs::path cfg = write_file("spec.json", R"({
    "command": "solve",
    "domain": {"kind": "rectangle", "width": 2, "height": 1},
    "resolution": 0.25,
    "hole": [[0.0, 0.5], [3.0, 0.5]],
    "run_id": "fixed"
  })");
  const Invocation r = run({"solve", "-c", cfg.string()});
  ASSERT_EQ(r.code, kExitConverged) << r.err;
  const fs::path dir = root_ / "fixed";
  for (const char* f : {"summary.json", "data.csv", "mesh.json", "extremal.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const json s = json::parse(slurp(dir / "summary.json"));
  for (const char* key : {"p", "q", "alpha_or_hole", "s_value", "lambda", "el_residual", "iterations", "converged",
                          "mesh", "seed", "spec"}) {
    EXPECT_TRUE(s.contains(key)) << key;
  }
  EXPECT_EQ(s["hole"]["arcs"].size(), 2u);
  const json mesh = json::parse(slurp(dir / "mesh.json"));
  EXPECT_EQ(mesh["vertices"].size(), s["mesh"]["n_vertices"].get<std::size_t>());
  EXPECT_EQ(mesh["cells"][0].size(), 3u);
  EXPECT_NEAR(mesh["boundary"].size() * 0.25, 6.0, 1e-12);

  std::ifstream csv(dir / "extremal.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,y,u");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, mesh["vertices"].size());
}

TEST_F(Cli, IdenticalSpecsGiveIdenticalOutput) {
  const std::vector<std::string> args{"optimize", "--alpha", "0.25", "--resolution", "0.25", "--seed", "4",
                                      "--set",    "/options/starts=2", "--workers", "2"};
  const Invocation a = run(args);
  ASSERT_EQ(a.code, kExitConverged) << a.err;
  const std::string first = slurp(root_ / summary_of(a)["run_id"].get<std::string>() / "summary.json");
  const std::string data = slurp(root_ / summary_of(a)["run_id"].get<std::string>() / "data.csv");
  fs::remove_all(root_);
  auto args1 = args;
  args1.back() = "1";
  const Invocation b = run(args1);
  ASSERT_EQ(b.code, kExitConverged);
  // The worker count is part of the spec, hence of the run id; compare the
  // results themselves.
  json ja = json::parse(first), jb = summary_of(b);
  ja.erase("run_id");
  ja.erase("spec");
  jb.erase("run_id");
  jb.erase("spec");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(data, slurp(root_ / summary_of(b)["run_id"].get<std::string>() / "data.csv"));
  // Same spec, same run id.
  const Invocation c = run(args1);
  EXPECT_EQ(c.out, b.out);
}

TEST_F(Cli, NonConvergenceExitsTwoAndStillWrites) {
  const Invocation r = run({"solve", "--alpha", "0.25", "--resolution", "0.2", "--max-inner-iterations", "3",
                     "--run-id", "short"});
  EXPECT_EQ(r.code, kExitNotConverged);
  const json s = json::parse(slurp(root_ / "short" / "summary.json"));
  EXPECT_FALSE(s["converged"].get<bool>());
}

TEST_F(Cli, EnvironmentSetsTheDefaultRoot) {
  ::setenv("STC_OUTPUT_ROOT", root_.string().c_str(), 1);
  const Invocation r = run({"solve", "--alpha", "0.25", "--resolution", "0.3", "--run-id", "env"}, false);
  ::unsetenv("STC_OUTPUT_ROOT");
  EXPECT_EQ(r.code, kExitConverged) << r.err;
  EXPECT_TRUE(fs::exists(root_ / "env" / "summary.json"));
}

TEST_F(Cli, ShapeGradientCheckEmitsTheFdTable) {
  const Invocation r = run({"shape-grad-check", "--alpha", "0.25", "--resolution", "0.1", "--run-id", "sg"});
  ASSERT_EQ(r.code, kExitConverged) << r.err;
  std::ifstream csv(root_ / "sg" / "data.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "h,fd_value,analytic_value,relative_error");
  const json s = summary_of(r);
  EXPECT_EQ(s["fd_estimates"].size(), 3u);
  EXPECT_LE(s["best_relative_error"].get<double>(), 0.02);
}

TEST_F(Cli, SweepsWriteTheirTables) {
  Invocation r = run({"sweep-alpha", "--resolution", "0.25", "--set", "/options/alphas=[0.2,0.4,0.6]", "--run-id", "sa"});
  ASSERT_EQ(r.code, kExitConverged) << r.err;
  EXPECT_TRUE(summary_of(r)["strictly_increasing"].get<bool>());
  r = run({"sweep-mu", "--set", "/options/mu_values=[0.5,0.25]", "--run-id", "sm"});
  ASSERT_EQ(r.code, kExitConverged) << r.err;
  const json s = summary_of(r);
  EXPECT_TRUE(s["extrapolated_regime"].get<bool>());
  EXPECT_EQ(s["records"].size(), 2u);
  std::ifstream csv(root_ / "sm" / "data.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "mu,S_mu,rescaled,slope_estimate");
}

TEST(Spec, DefaultRunIdIgnoresOutputLocation) {
  const json a = {{"command", "solve"}, {"alpha", 0.2}};
  json b = a;
  b["output_root"] = "/elsewhere";
  b["run_id"] = "x";
  EXPECT_EQ(default_run_id(a), default_run_id(b));
  json c = a;
  c["seed"] = 2;
  EXPECT_NE(default_run_id(a), default_run_id(c));
  EXPECT_EQ(default_run_id(a).rfind("solve-", 0), 0u);
}

TEST(Spec, ValidatesFields) {
  EXPECT_THROW(parse_run_spec(json{{"command", "explode"}}), SpecError);
  EXPECT_THROW(parse_run_spec(json{{"command", "solve"}, {"alpha", 1.5}}), SpecError);
  EXPECT_THROW(parse_run_spec(json{{"command", "solve"}, {"alpha", 0.2}, {"hole", {{0.0, 1.0}}}}), SpecError);
  EXPECT_THROW(parse_run_spec(json{{"command", "solve"}, {"domain", {{"kind", "torus"}}}}), SpecError);
  EXPECT_THROW(parse_run_spec(json{{"command", "solve"}, {"run_id", "../x"}}), SpecError);
  EXPECT_THROW(parse_run_spec(json{{"command", "solve"}, {"seed", -1}}), SpecError);
  const RunSpec ok = parse_run_spec(json{{"command", "verify-1d"}, {"cfg", {{"p", 3}}}});
  EXPECT_EQ(ok.cfg.p, 3.0);
}

}  // namespace
}  // namespace stc::cli
