#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args` (shell syntax); stderr goes to `err` when given.
Run cli(const std::string& args, const std::string& err = "/dev/null") {
  const std::string cmd = std::string(ANDOR_CLI) + " " + args + " 2>" + err;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "andor_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("cost of SOLVE on d_eps") {
  auto r = cli("cost --tree uniform:OR:2:3 --eps 1/100 --strategy solve");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["cost"]["exact"] == "6321/1600");
  CHECK(j["depth_first"] == true);
  CHECK(j["directional"] == true);

  auto f = json::parse(cli("cost --tree uniform:OR:2:3 --eps 0.01 --strategy solve").out);
  CHECK(f["cost"]["float"].get<double>() == doctest::Approx(6321.0 / 1600.0));
  CHECK_FALSE(f["cost"].contains("exact"));
}

TEST_CASE("cost of A_0 reports the depth-first violation") {
  auto j = json::parse(cli("cost --tree uniform:OR:2:3 --eps 0 --strategy a0").out);
  CHECK(j["cost"]["exact"] == "31/8");
  CHECK(j["depth_first"] == false);
  CHECK(j.contains("depth_first_witness"));
}

TEST_CASE("invalid strategies exit 3") {
  auto r = cli(R"(cost --tree uniform:AND:2:1 --dist '{"iid":"1/2"}' --strategy '{"terminal":1}')");
  CHECK(r.code == 3);
}

TEST_CASE("optimal costs at the limit distribution") {
  auto g = json::parse(cli("optimal --tree uniform:OR:2:3 --eps 0 --class general").out);
  CHECK(g["value"] == "15/4");
  auto df = json::parse(cli("optimal --tree uniform:OR:2:3 --eps 0 --class depth").out);
  CHECK(df["value"] == "63/16");
}

TEST_CASE("the optimal witness round-trips through --out") {
  const auto w = scratch("witness.json");
  auto r = cli(R"(optimal --tree uniform:AND:2:2 --dist '{"leaves":["1/2","1/3","3/4","1/5"]}' --out )" + w.string());
  REQUIRE(r.code == 0);
  const auto value = json::parse(r.out)["value"].get<std::string>();
  auto c = cli(R"(cost --tree uniform:AND:2:2 --dist '{"leaves":["1/2","1/3","3/4","1/5"]}' --strategy )" + w.string());
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["cost"]["exact"] == value);
}

TEST_CASE("error exit codes") {
  CHECK(cli(R"(optimal --tree uniform:AND:3:3 --dist '{"iid":"1/2"}')").code == 4);
  CHECK(cli("verify nosuchsuite").code == 2);
  CHECK(cli(R"(optimal --tree 'AND(l,x)' --dist '{"iid":"1/2"}')").code == 2);
  CHECK(cli("equilibrium --tree uniform:AND:2:2 --r 0").code == 5);
  CHECK(cli("cost --tree uniform:AND:2:2 --eps 1/2 --strategy solve").code == 2);
  CHECK(cli("--no-such-flag").code == 2);
}

TEST_CASE("catalog lists sixteen algorithms whose costs equal f") {
  auto j = json::parse(cli(R"(catalog --tree uniform:AND:2:2 --dist '{"leaves":["1/3","1/2","2/5","3/4"]}')").out);
  REQUIRE(j.size() == 16);
  for (const auto& row : j) CHECK(row["cost"] == row["f"]);
}

TEST_CASE("verify prop31 passes") {
  auto r = cli("verify prop31");
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["failures"] == 0);
}

TEST_CASE("equilibrium on the binary height-2 tree") {
  auto j = json::parse(cli("equilibrium --tree uniform:AND:2:2 --class general --starts 4").out);
  CHECK(j["iid_deviation"].get<double>() <= 1e-6);

  const auto csv = scratch("traj.csv");
  auto r = cli("equilibrium --tree uniform:AND:3:2 --class depth --r 0.5 --starts 4 --csv " + csv.string());
  REQUIRE(r.code == 0);
  auto c = json::parse(r.out);
  CHECK(c["root_probability"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c["iid_deviation"].get<double>() <= 1e-6);
  CHECK(slurp(csv).rfind("start,cycle,value", 0) == 0);
}

TEST_CASE("manifests are deterministic up to wall-clock time") {
  const auto m1 = scratch("m1.json"), m2 = scratch("m2.json");
  const std::string args = R"(optimal --tree uniform:OR:2:2 --dist '{"iid":"2/5"}' --manifest )";
  auto a = cli(args + m1.string());
  auto b = cli(args + m2.string());
  CHECK(a.out == b.out);
  auto ja = json::parse(slurp(m1)), jb = json::parse(slurp(m2));
  CHECK(ja["results_digest"] == jb["results_digest"]);
  CHECK(ja["config"] == jb["config"]);
  CHECK(ja["command"] == "optimal");
  CHECK(ja.contains("version"));
  CHECK(ja.contains("wall_clock_seconds"));

  const auto err = scratch("stderr.txt");
  cli(R"(optimal --tree uniform:OR:2:2 --dist '{"iid":"2/5"}')", err.string());
  CHECK(slurp(err).find("manifest {") != std::string::npos);
}

}  // TEST_SUITE
