// Copyright 2026 The prepspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "prepspace_cli_test" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::string write_config(const std::string& name, const json& cfg) const {
    std::ofstream(path(name)) << cfg.dump(2);
    return path(name).string();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "prepspace");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return prepspace::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json load(const fs::path& p) { return json::parse(slurp(p)); }

  static std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(in, line);) {
      std::vector<std::string> row;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) row.push_back(cell);
      rows.push_back(row);
    }
    return rows;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

json sigma_x_config(double a) {
  return {{"n", 2},
          {"hamiltonian", {{"matrix", {{0.0, 1.0}, {1.0, 0.0}}}}},
          {"initial",
           {{"p", {std::cos(a) * std::cos(a), std::sin(a) * std::sin(a)}},
            {"phi", {0.0, -oracle::kPi / 2.0}}}}};
}

}  // namespace

TEST_F(CliTest, EvolveDiagonalKeepsProbabilities) {
  const json cfg = {{"n", 3},
                    {"hamiltonian", {{"diagonal", {0.0, 1.0, 2.5}}}},
                    {"initial", {{"p", {0.2, 0.3, 0.5}}, {"phi", {0.0, 0.1, 0.2}}}}};
  ASSERT_EQ(run({"evolve", "--config", write_config("c.json", cfg), "--t-final", "2", "--step",
                 "0.01", "--out", path("out").string()}),
            0)
      << err_.str();
  const auto rows = csv(path("out") / "trajectory.csv");
  ASSERT_GT(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "t");
  EXPECT_EQ(rows[0][1], "p_1");
  EXPECT_EQ(rows[0].back(), "energy");
  const auto& last = rows.back();
  EXPECT_DOUBLE_EQ(std::stod(last[0]), 2.0);
  EXPECT_NEAR(std::stod(last[1]), 0.2, 1e-14);
  EXPECT_NEAR(std::stod(last[3]), 0.5, 1e-14);
  // phi_2 - phi_1 advances at -(E_2 - E_1).
  const double rel = std::stod(last[5]) - std::stod(last[4]);
  EXPECT_NEAR(oracle::angle_diff(rel, 0.1 - 2.0), 0.0, 1e-10);

  const json s = load(path("out") / "summary.json");
  EXPECT_EQ(s["schema"], "prepspace-report/1");
  EXPECT_EQ(s["status"], "pass");
  EXPECT_TRUE(fs::exists(path("out") / "timing.json"));
}

TEST_F(CliTest, EvolveZeroHamiltonianIsStatic) {
  const json cfg = {{"n", 2},
                    {"hamiltonian", {{"diagonal", {0.0, 0.0}}}},
                    {"initial", {{"p", {0.4, 0.6}}, {"phi", {1.0, 2.0}}}}};
  ASSERT_EQ(run({"evolve", "--config", write_config("c.json", cfg), "--t-final", "1", "--out",
                 path("out").string()}),
            0);
  for (const auto& row : csv(path("out") / "trajectory.csv")) {
    if (row[0] == "t") continue;
    EXPECT_EQ(std::stod(row[1]), 0.4);
    EXPECT_EQ(std::stod(row[3]), 1.0);
    EXPECT_EQ(std::stod(row[4]), 2.0);
  }
}

TEST_F(CliTest, EvolveRandomAgreesWithSchrodinger) {
  const json cfg = {{"n", 2},
                    {"seed", 5},
                    {"hamiltonian", {{"generator", "random-hermitian"}}},
                    {"initial", {{"generator", "random-interior"}, {"min_p", 0.1}}}};
  const int code = run({"evolve", "--config", write_config("c.json", cfg), "--t-final", "10",
                        "--step", "1e-3", "--out", path("out").string()});
  const json s = load(path("out") / "summary.json");
  if (s["status"] == "numerical-abort") GTEST_SKIP() << "trajectory met the boundary";
  EXPECT_EQ(code, 0) << s.dump(2);
  EXPECT_GT(s["oracle_fidelity"].get<double>(), 1.0 - 1e-6);
  EXPECT_LT(s["energy_drift"].get<double>(), 1e-6);
  EXPECT_LT(s["norm_drift"].get<double>(), 1e-9);
}

TEST_F(CliTest, EvolveAbortsAtBoundary) {
  EXPECT_EQ(run({"evolve", "--config", write_config("c.json", sigma_x_config(0.3)), "--t-final",
                 "3", "--out", path("out").string()}),
            3);
  const json s = load(path("out") / "summary.json");
  EXPECT_EQ(s["status"], "numerical-abort");
  EXPECT_LT(s["last_good_time"].get<double>(), oracle::kPi / 2.0 - 0.3);
  EXPECT_GT(csv(path("out") / "trajectory.csv").size(), 2u);
}

TEST_F(CliTest, MethodsAreSelectable) {
  for (const std::string m : {"implicit-midpoint", "rk4"}) {
    ASSERT_EQ(run({"evolve", "--config", write_config("c.json", sigma_x_config(0.3)), "--t-final",
                   "0.5", "--method", m, "--out", path(m).string()}),
              0)
        << m;
    EXPECT_EQ(load(path(m) / "summary.json")["method"], m);
  }
}

TEST_F(CliTest, CsvCarriesSeventeenDigits) {
  ASSERT_EQ(run({"evolve", "--config", write_config("c.json", sigma_x_config(0.3)), "--t-final",
                 "0.3", "--step", "0.1", "--out", path("out").string()}),
            0);
  const auto rows = csv(path("out") / "trajectory.csv");
  // cos^2(0.3) has no short decimal form, so all 17 significant digits show.
  const std::string& p1 = rows[1][1];
  ASSERT_EQ(p1.rfind("0.", 0), 0u) << p1;
  EXPECT_EQ(p1.size() - 2, 17u) << p1;
  EXPECT_EQ(std::stod(p1), std::cos(0.3) * std::cos(0.3));
}

TEST_F(CliTest, ConfigErrorsNameTheField) {
  json cfg = sigma_x_config(0.3);
  cfg["hamiltonian"]["matrix"][1][0] = {1.0, 0.5};
  EXPECT_EQ(run({"evolve", "--config", write_config("c.json", cfg), "--t-final", "1", "--out",
                 path("out").string()}),
            2);
  EXPECT_NE(err_.str().find("hamiltonian"), std::string::npos) << err_.str();

  cfg = sigma_x_config(0.3);
  cfg["integrator"] = {{"stepp", 0.1}};
  EXPECT_EQ(run({"evolve", "--config", write_config("c.json", cfg), "--t-final", "1", "--out",
                 path("out").string()}),
            2);
  EXPECT_NE(err_.str().find("integrator.stepp"), std::string::npos) << err_.str();

  cfg = sigma_x_config(0.3);
  cfg["initial"]["p"] = {0.5, 0.6};
  EXPECT_EQ(run({"evolve", "--config", write_config("c.json", cfg), "--t-final", "1", "--out",
                 path("out").string()}),
            2);
  EXPECT_NE(err_.str().find("initial"), std::string::npos) << err_.str();

  std::ofstream(path("bad.json")) << "{\"n\": 2,";
  EXPECT_EQ(run({"evolve", "--config", path("bad.json").string(), "--t-final", "1", "--out",
                 path("out").string()}),
            2);
  EXPECT_EQ(run({"evolve", "--config", path("missing.json").string(), "--t-final", "1", "--out",
                 path("out").string()}),
            2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"verify", "--suite", "nonsense", "--n", "2", "--seed", "1", "--out",
                 path("r.json").string()}),
            2);
  EXPECT_EQ(run({"verify", "--suite", "geometry", "--n", "9", "--seed", "1", "--out",
                 path("r.json").string()}),
            2);
  EXPECT_EQ(run({"evolve", "--config", write_config("c.json", sigma_x_config(0.3)), "--t-final",
                 "1", "--method", "euler", "--out", path("out").string()}),
            2);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, VerifySymplecticPasses) {
  ASSERT_EQ(run({"verify", "--suite", "symplectic", "--n", "3", "--seed", "7", "--out",
                 path("r.json").string()}),
            0)
      << err_.str();
  const json r = load(path("r.json"));
  EXPECT_EQ(r["schema"], "prepspace-report/1");
  EXPECT_TRUE(r["passed"].get<bool>());
  EXPECT_FALSE(r["checks"].empty());
  // The control map is not canonical and must be seen as such.
  for (const auto& c : r["checks"]) EXPECT_TRUE(c["passed"].get<bool>()) << c.dump();
}

TEST_F(CliTest, VerifyGeometryPasses) {
  ASSERT_EQ(run({"verify", "--suite", "geometry", "--n", "2", "--seed", "3", "--out",
                 path("r.json").string()}),
            0)
      << err_.str();
  const json r = load(path("r.json"));
  EXPECT_TRUE(r["passed"].get<bool>());
}

TEST_F(CliTest, VerifyReportsAreByteIdentical) {
  for (const char* name : {"a.json", "b.json"}) {
    ASSERT_EQ(run({"verify", "--suite", "correspondence", "--n", "2", "--seed", "11", "--out",
                   path(name).string()}),
              0)
        << err_.str();
  }
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  ASSERT_EQ(run({"verify", "--suite", "correspondence", "--n", "2", "--seed", "12", "--out",
                 path("c.json").string()}),
            0);
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(CliTest, StatmechTwoLevel) {
  const json cfg = {{"n", 2}, {"seed", 1}, {"observable", {{"diagonal", {0.0, 1.0}}}}};
  ASSERT_EQ(run({"statmech", "--config", write_config("c.json", cfg), "--mean", "0.25",
                 "--samples", "20000", "--out", path("out").string()}),
            0)
      << err_.str();
  const json r = load(path("out") / "report.json");
  EXPECT_EQ(r["schema"], "prepspace-report/1");
  EXPECT_NEAR(r["maxent"]["beta"].get<double>(), std::log(3.0), 1e-10);
  EXPECT_NEAR(r["rho_t0"]["trace"].get<double>(), 1.0,
              3.0 * r["rho_t0"]["trace_std_error"].get<double>());
  // w0 < 0 exactly where p_1 < 1/6; that region carries (2 pi)^2 / 6 of the
  // volume and the negative integral is -1/24.
  EXPECT_NEAR(r["negative_mass"]["fraction"].get<double>(), 1.0 / 6.0, 0.01);
  EXPECT_NEAR(r["negative_mass"]["mass"].get<double>(), -1.0 / 24.0,
              4.0 * r["negative_mass"]["std_error"].get<double>());
}

TEST_F(CliTest, StatmechSpectrumMeanGivesZeroBeta) {
  const json cfg = {{"n", 3}, {"observable", {{"diagonal", {0.0, 1.0, 2.0}}}}};
  ASSERT_EQ(run({"statmech", "--config", write_config("c.json", cfg), "--mean", "1",
                 "--samples", "20000", "--out", path("out").string()}),
            0)
      << err_.str();
  const json r = load(path("out") / "report.json");
  EXPECT_NEAR(r["maxent"]["beta"].get<double>(), 0.0, 1e-10);
  EXPECT_NEAR(r["entropy"]["discrete"].get<double>(), std::log(3.0), 1e-10);
}

TEST_F(CliTest, StatmechInfeasibleMean) {
  const json cfg = {{"n", 2}, {"observable", {{"diagonal", {0.0, 1.0}}}}};
  EXPECT_EQ(run({"statmech", "--config", write_config("c.json", cfg), "--mean", "1.5", "--out",
                 path("out").string()}),
            4);
  const json r = load(path("out") / "report.json");
  EXPECT_EQ(r["status"], "infeasible");
  EXPECT_EQ(r["schema"], "prepspace-report/1");
}

TEST_F(CliTest, StatmechCanonicalEnsembleIsStationary) {
  const json cfg = {{"n", 2},
                    {"seed", 4},
                    {"hamiltonian",
                     {{"matrix", {{json(1.0), json({0.5, -0.3})}, {json({0.5, 0.3}), json(-0.5)}}}}},
                    {"observable", {{"generator", "hamiltonian"}}},
                    {"probe", {{"generator", "random-hermitian"}}},
                    {"montecarlo", {{"flow_samples", 2000}}},
                    {"statmech", {{"probe_points", 20}, {"time_points", 3}}}};
  // The energies are 0.25 -+ sqrt(0.9025).
  ASSERT_EQ(run({"statmech", "--config", write_config("c.json", cfg), "--mean", "0.0",
                 "--t-final", "1", "--samples", "20000", "--out", path("out").string()}),
            0)
      << err_.str() << out_.str();
  const json r = load(path("out") / "report.json");
  EXPECT_LT(r["stationarity_max_deviation"].get<double>(), 1e-6);
  EXPECT_TRUE(r["passed"].get<bool>());
}

TEST_F(CliTest, StatmechReportsAreByteIdentical) {
  const json cfg = {{"n", 3}, {"seed", 9}, {"observable", {{"generator", "random-hermitian"}}}};
  const std::string c = write_config("c.json", cfg);
  for (const char* out : {"a", "b"}) {
    setenv("PREPSPACE_THREADS", out[0] == 'a' ? "1" : "4", 1);
    ASSERT_EQ(run({"statmech", "--config", c, "--mean", "0.1", "--samples", "20000", "--out",
                   path(out).string()}),
              0)
        << err_.str();
  }
  unsetenv("PREPSPACE_THREADS");
  EXPECT_EQ(slurp(path("a") / "report.json"), slurp(path("b") / "report.json"));
}

TEST_F(CliTest, InstalledBinaryExitCodes) {
  const char* exe = std::getenv("PREPSPACE_CLI");
  if (exe == nullptr) GTEST_SKIP() << "PREPSPACE_CLI not set";
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string bin = std::string("'") + exe + "'";
  EXPECT_EQ(status(bin + " --help"), 0);
  EXPECT_EQ(status(bin + " frobnicate"), 2);
  const json cfg = {{"n", 2}, {"observable", {{"diagonal", {0.0, 1.0}}}}};
  const std::string c = write_config("c.json", cfg);
  EXPECT_EQ(status(bin + " statmech --config '" + c + "' --mean 2 --out '" +
                   path("out").string() + "'"),
            4);
  EXPECT_EQ(status(bin + " evolve --config '" + write_config("s.json", sigma_x_config(0.3)) +
                   "' --t-final 3 --out '" + path("ev").string() + "'"),
            3);
}
