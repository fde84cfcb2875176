#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const std::string kCli = LANLAB_CLI_PATH;
const std::string kConfigs = LANLAB_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("lanlab_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

TEST(Cli, UnknownSubcommandUsage) {
  EXPECT_EQ(run("frobnicate --config " + kConfigs + "/sine_ou.json"), 64);
  EXPECT_EQ(run(""), 64);
}

TEST(Cli, MissingConfigFile) {
  EXPECT_EQ(run("fisher --config /nonexistent/nope.json"), 66);
}

TEST(Cli, FisherEmitsClosedFormValues) {
  const fs::path dir = fresh_dir("fisher");
  ASSERT_EQ(run("fisher --config " + kConfigs + "/sine_ou.json --output-dir " +
                dir.string()),
            0);
  const std::string csv = slurp(dir / "fisher.csv");
  EXPECT_NE(csv.find("F,theta1,0.5,"), std::string::npos) << csv;
  // corner entry 2 pi^2 / 3 = 6.5797...
  EXPECT_NE(csv.find(",6.5797"), std::string::npos) << csv;
  const auto summary =
      nlohmann::json::parse(slurp(dir / "fisher_summary.json"));
  EXPECT_TRUE(summary.at("S7").get<bool>());
  EXPECT_NEAR(summary.at("config").at("fisher_t").get<double>(), 1.0, 0.0);
}

TEST(Cli, LanCheckZeroDirectionResiduals) {
  const fs::path dir = fresh_dir("lanzero");
  ASSERT_EQ(run("lan-check --config " + kConfigs +
                "/sine_ou.json --n 1 --replications 1 --h 0 --output-dir " +
                dir.string()),
            0);
  std::ifstream in(dir / "lan_replications.csv");
  std::string header, row;
  ASSERT_TRUE(std::getline(in, header));
  ASSERT_TRUE(std::getline(in, row));
  const auto cols = split_csv(header);
  const auto vals = split_csv(row);
  ASSERT_EQ(cols.size(), vals.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "lambda" || cols[i] == "quad" || cols[i] == "R_integral" ||
        cols[i] == "R_residual" || cols[i] == "U" || cols[i] == "V")
      EXPECT_EQ(std::stod(vals[i]), 0.0) << cols[i];
  }
}

TEST(Cli, RatesRejectsShortNList) {
  EXPECT_EQ(run("rates --config " + kConfigs + "/bad_nlist.json"), 2);
}

TEST(Cli, SimulateWritesPathAndHonorsEnvOverride) {
  const fs::path dir = fresh_dir("simenv");
  const std::string cmd = "LANLAB_OUTPUT_DIR=" + dir.string() + " " + kCli +
                          " simulate --config " + kConfigs +
                          "/sine_ou.json --n 5 >/dev/null 2>&1";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  ASSERT_TRUE(fs::exists(dir / "path.csv"));
  std::ifstream in(dir / "path.csv");
  std::string header;
  ASSERT_TRUE(std::getline(in, header));
  EXPECT_NE(header.find("xi"), std::string::npos);
}

TEST(Cli, RerunsAreByteIdenticalModuloMetadata) {
  const fs::path d1 = fresh_dir("rep1");
  const fs::path d2 = fresh_dir("rep2");
  const std::string base = "lan-check --config " + kConfigs +
                           "/sine_ou.json --n 20 --replications 5 "
                           "--output-dir ";
  ASSERT_EQ(run(base + d1.string() + " --threads 1"), 0);
  ASSERT_EQ(run(base + d2.string() + " --threads 4"), 0);
  EXPECT_EQ(slurp(d1 / "lan_replications.csv"),
            slurp(d2 / "lan_replications.csv"));
  auto j1 = nlohmann::json::parse(slurp(d1 / "lan_summary.json"));
  auto j2 = nlohmann::json::parse(slurp(d2 / "lan_summary.json"));
  j1.erase("metadata");
  j2.erase("metadata");
  // the output directory itself differs by construction
  j1.at("config").erase("output_dir");
  j2.at("config").erase("output_dir");
  EXPECT_EQ(j1, j2);
}

TEST(Cli, EstimateEmitsProfileCurve) {
  const fs::path dir = fresh_dir("estimate");
  ASSERT_EQ(run("estimate --config " + kConfigs +
                "/sine_ou.json --n 50 --output-dir " + dir.string()),
            0);
  const std::string curve = slurp(dir / "profile_curve.csv");
  EXPECT_NE(curve.find("T,profiled_loglik"), std::string::npos);
  const auto summary =
      nlohmann::json::parse(slurp(dir / "estimate_summary.json"));
  EXPECT_NEAR(summary.at("T_hat").get<double>(), 1.0, 0.05);
  ASSERT_TRUE(summary.contains("stderr"));
}

TEST(Cli, ErgodicCheckWritesClosedForms) {
  const fs::path dir = fresh_dir("ergodic");
  ASSERT_EQ(run("ergodic-check --config " + kConfigs +
                "/sine_ou.json --n 50 --output-dir " + dir.string()),
            0);
  const std::string csv = slurp(dir / "ergodic.csv");
  EXPECT_NE(csv.find("f,k,estimate,closed_form"), std::string::npos);
  EXPECT_NE(csv.find("sin2_2pi,0,"), std::string::npos);
  EXPECT_NE(csv.find(",0.5\n"), std::string::npos);
}

}  // namespace
