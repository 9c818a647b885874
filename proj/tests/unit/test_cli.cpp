#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "hcent/measures.hpp"

using json = nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out;
};

// Runs the CLI with stderr discarded; returns exit status and stdout.
Run run(const std::string& args) {
  const std::string cmd = std::string(HCENT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hcent_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_config(const std::filesystem::path& p, std::size_t block_len, double r_max) {
  std::ofstream(p) << json{{"schema_version", 1},
                           {"sweep_kind", "critical_r"},
                           {"chain", {{"preset", "critical"}, {"n_sites", 512}}},
                           {"grid", {{"block_len", block_len}, {"r_min", 0.1}, {"r_max", r_max}, {"points", 10}}},
                           {"output", "crit"}}
                          .dump(2);
}

}  // namespace

TEST_CASE("measure: uncoupled chain") {
  const auto r = run("measure --coupling 0 --block-len 4 --separation 8");
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK(j["E_LN_bits"].get<double>() == 0.0);
  CHECK(std::abs(j["I_nats"].get<double>()) < 1e-12);
}

TEST_CASE("measure matches the library call") {
  const auto r = run("measure --n-sites 16 --coupling 0.5 --block-len 2 --separation 2");
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  const auto k = hcent::build_kernel(hcent::ChainSpec::from_coupling(16, 0.5));
  const auto m = hcent::measure_pair(k, hcent::BlockPair::make(16, 2, 2));
  CHECK(j["S_A"].get<double>() == m.entropy_a);
  CHECK(j["I_nats"].get<double>() == m.mutual_information);
  CHECK(j["E_LN_bits"].get<double>() == m.log_negativity);

  const auto csv = run("measure --n-sites 16 --coupling 0.5 --block-len 2 --separation 2 --format csv");
  CHECK(csv.status == 0);
  CHECK(csv.out.rfind("N,coupling", 0) == 0);
}

TEST_CASE("measure errors leave no output") {
  for (const char* args : {"measure --block-len 4 --separation 2 --bogus", "measure --n-sites 10 --block-len 4 --separation 4",
                           "measure --coupling 1.5 --block-len 1 --separation 1", "measure --block-len x --separation 1",
                           "measure --coupling 0.5 --xi 3 --block-len 1 --separation 1"}) {
    CAPTURE(args);
    const auto r = run(args);
    CHECK(r.status != 0);
    CHECK(r.out.empty());
  }
}

TEST_CASE("sweep writes CSV and manifest, refuses to overwrite, is byte-stable") {
  const auto dir = scratch("sweep");
  write_config(dir / "c.json", 64, 2.0);
  REQUIRE(run("sweep " + (dir / "c.json").string() + " --out-dir " + (dir / "a").string()).status == 0);
  const auto csv = slurp(dir / "a" / "crit.csv");
  const auto manifest = json::parse(slurp(dir / "a" / "crit.manifest.json"));
  CHECK(manifest["grid_summary"]["points"] == 10);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);

  // E_LN column decreasing.
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  double prev = 1e300;
  int n = 0;
  while (std::getline(lines, line)) {
    const double e = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(e < prev);
    prev = e;
    ++n;
  }
  CHECK(n == 10);

  CHECK(run("sweep " + (dir / "c.json").string() + " --out-dir " + (dir / "a").string()).status != 0);
  CHECK(slurp(dir / "a" / "crit.csv") == csv);
  REQUIRE(run("sweep " + (dir / "c.json").string() + " --out-dir " + (dir / "a").string() + " --force").status == 0);
  CHECK(slurp(dir / "a" / "crit.csv") == csv);
  const auto again = json::parse(slurp(dir / "a" / "crit.manifest.json"));
  CHECK(again["config_hash"] == manifest["config_hash"]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep rejects a grid point that does not fit") {
  const auto dir = scratch("badgrid");
  write_config(dir / "c.json", 200, 3.0);
  const auto r = run("sweep " + (dir / "c.json").string() + " --out-dir " + (dir / "o").string());
  CHECK(r.status != 0);
  CHECK_FALSE(std::filesystem::exists(dir / "o" / "crit.csv"));
  // The diagnostic names the grid point.
  const std::string cmd = std::string(HCENT_CLI_PATH) + " sweep " + (dir / "c.json").string() + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 512> buf{};
  std::string err;
  while (std::fgets(buf.data(), buf.size(), pipe)) err += buf.data();
  pclose(pipe);
  CHECK(err.find("grid[") != std::string::npos);
  CHECK(err.find("2L + D") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fit reports coefficients and rejects thin windows") {
  const auto dir = scratch("fit");
  std::ofstream(dir / "c.json") << json{{"schema_version", 1},
                                        {"sweep_kind", "critical_r"},
                                        {"chain", {{"preset", "critical"}, {"n_sites", 1024}}},
                                        {"grid", {{"block_len", 32}, {"r_min", 0.05}, {"r_max", 2.5}, {"points", 24}}},
                                        {"output", "crit"}}
                                           .dump();
  REQUIRE(run("sweep " + (dir / "c.json").string() + " --out-dir " + dir.string()).status == 0);
  const auto csv = (dir / "crit.csv").string();

  const auto e = run("fit " + csv + " --model exp_linear --lo 0.5 --hi 2.5");
  REQUIRE(e.status == 0);
  const auto j = json::parse(e.out);
  CHECK(j["coefficients"]["decay"].get<double>() > 2.0);
  CHECK(j["n_points"].get<int>() >= 3);

  const auto p = run("fit " + csv + " --model power_law --hi 0.25 --detrend-beta auto");
  REQUIRE(p.status == 0);
  CHECK(json::parse(p.out)["coefficients"]["exponent"].get<double>() < 0.0);

  CHECK(run("fit " + csv + " --model exp_linear --lo 0.5 --hi 0.52").status != 0);
  CHECK(run("fit " + csv + " --y nope").status != 0);
  CHECK(run("fit " + csv + " --model cubic").status != 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("kernel export and self-check") {
  const auto k = run("kernel --n-sites 8 --coupling 0.5 --which g");
  REQUIRE(k.status == 0);
  CHECK(k.out.rfind("# lag g\n0 ", 0) == 0);
  CHECK(run("reproduce fig9").status != 0);
  CHECK(run("--version").status == 0);
}
