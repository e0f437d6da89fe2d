#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "../tools/cli.hpp"
#include "trl/errors.hpp"

namespace fs = std::filesystem;
using namespace trl;
using trl::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("trlkit_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// Keeps the CLI sweeps to a couple of seconds.
const std::vector<std::string> kQuick = {"--edge", "4", "--tol", "0.1", "--dof-budget", "40000"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("range syntax") {
  const auto t = cli::parse_range("0.3:1.0:0.1");
  REQUIRE(t.size() == 8);
  CHECK(t[0] == 0.3);
  CHECK(t[4] == 0.7);
  CHECK(t[7] == 1.0);
  CHECK(cli::parse_range("2:30").size() == 29);
  CHECK(cli::parse_range("2,5,7,30") == std::vector<double>{2, 5, 7, 30});
  CHECK(cli::parse_range("2:4,10") == std::vector<double>{2, 3, 4, 10});
  CHECK(cli::parse_range("7:7") == std::vector<double>{7});
  for (const char* bad : {"", "a", "1:0", "1:2:0", "1:2:3:4", "1,,2"}) {
    CHECK_THROWS_AS(cli::parse_range(bad), InvalidInput);
  }
}

TEST_CASE("strict config parsing") {
  const auto c = cli::config_from_json(
      nlohmann::json::parse(R"({"length_mm": 80, "triangles": "2:4", "thickness_mm": [0.5, 0.6]})"));
  CHECK(*c.length_mm == 80);
  CHECK(*c.triangles == std::vector<double>{2, 3, 4});
  CHECK(*c.thickness_mm == std::vector<double>{0.5, 0.6});
  CHECK_THROWS_AS(cli::config_from_json(nlohmann::json::parse(R"({"length": 80})")), InvalidInput);
  CHECK_THROWS_AS(cli::config_from_json(nlohmann::json::parse("[1]")), InvalidInput);
  CHECK_THROWS_AS(cli::config_from_json(nlohmann::json::parse(R"({"length_mm": "long"})")),
                  InvalidInput);

  const auto dir = scratch("config");
  std::ofstream(dir / "bad.json") << R"({"force": 1})";
  const auto r = call({"sll-analyze", "--config", (dir / "bad.json").string()});
  CHECK(r.code == cli::kConfigError);
  const auto err = nlohmann::json::parse(r.err);
  CHECK(err["error"]["code"] == 2);
  CHECK(err["error"]["message"].get<std::string>().find("force") != std::string::npos);
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("override");
  std::ofstream(dir / "cfg.json") << R"({"thickness_mm": [0.4], "force_n": 0.02, "formats": ["csv"]})";
  const auto r = call(with({"sll-analyze", "--config", (dir / "cfg.json").string(), "--thickness",
                            "1.0", "--out-dir", dir.string()},
                           kQuick));
  REQUIRE(r.code == cli::kOk);
  const std::string csv = slurp(dir / "sll_sweep.csv");
  CHECK(csv.find("SLL,1,") != std::string::npos);
  CHECK(csv.find("SLL,0.4,") == std::string::npos);
  CHECK_FALSE(fs::exists(dir / "sll_sweep.json"));
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("env");
  ::setenv("TRLKIT_OUTPUT_DIR", dir.string().c_str(), 1);
  const auto r = call(with({"sll-analyze", "--thickness", "1.0", "--formats", "csv"}, kQuick));
  ::unsetenv("TRLKIT_OUTPUT_DIR");
  CHECK(r.code == cli::kOk);
  CHECK(fs::exists(dir / "sll_sweep.csv"));
}

TEST_CASE("every numeric flag names its unit in help") {
  for (const char* cmd : {"sll-analyze", "trl-sweep", "grasp-predict", "mesh-export", "validate"}) {
    const auto r = call({cmd, "--help"});
    REQUIRE(r.code == cli::kOk);
    std::istringstream lines(r.out);
    std::string line;
    int numeric = 0;
    while (std::getline(lines, line)) {
      if (line.find(" NUM") == std::string::npos && line.find(" RANGE") == std::string::npos) continue;
      ++numeric;
      INFO(cmd, ": ", line);
      CHECK(line.find('[') != std::string::npos);
    }
    CHECK(numeric > 0);
  }
}

TEST_CASE("sll-analyze outputs") {
  const auto dir = scratch("sll");
  const auto r = call(with({"sll-analyze", "--thickness", "0.5,1.0", "--out-dir", dir.string()}, kQuick));
  REQUIRE(r.code == cli::kOk);
  for (const char* f : {"sll_analysis.csv", "sll_sweep.csv", "sll_sweep.json",
                        "sll_sweep_in_plane.svg", "sll_sweep_angular.svg", "sll_sweep.meta.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const std::string analysis = slurp(dir / "sll_analysis.csv");
  CHECK(std::count(analysis.begin(), analysis.end(), '\n') == 3);

  const auto zero = call(with({"sll-analyze", "--thickness", "1.0", "--force", "0", "--formats",
                               "csv", "--out-dir", dir.string()},
                              kQuick));
  CHECK(zero.code == cli::kOk);
  CHECK(slurp(dir / "sll_sweep.csv").find("SLL,1,0,") != std::string::npos);

  CHECK(call({"sll-analyze", "--thickness", "-1"}).code == cli::kConfigError);
  CHECK(call({"sll-analyze", "--tol", "0.5"}).code == cli::kConfigError);
  CHECK(call({"sll-analyze", "--bogus"}).code == cli::kConfigError);
  CHECK(call({}).code == cli::kConfigError);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto args = with({"trl-sweep", "--triangles", "2,3,4"}, kQuick);
  REQUIRE(call(with(args, {"--out-dir", a.string(), "--jobs", "1"})).code == cli::kOk);
  REQUIRE(call(with(args, {"--out-dir", b.string(), "--jobs", "0"})).code == cli::kOk);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name.find(".meta.json") != std::string::npos) continue;
    ++compared;
    INFO(name);
    CHECK(slurp(entry.path()) == slurp(b / name));
  }
  CHECK(compared >= 5);
  const auto summary = nlohmann::json::parse(slurp(a / "trl_summary.json"));
  CHECK(summary["selection"].contains("CyclicLife"));
  CHECK(summary["shape"].contains("angular_deg"));
}

TEST_CASE("single-point sweep declines the shape check") {
  const auto dir = scratch("single");
  const auto r = call(with({"trl-sweep", "--triangles", "7:7", "--out-dir", dir.string()}, kQuick));
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("shape check declined") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(dir / "trl_summary.json"));
  CHECK(summary["shape"]["in_plane_mm"].contains("declined"));
  const std::string csv = slurp(dir / "trl_sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("solver failures exit 3") {
  const auto dir = scratch("budget");
  const auto r = call({"trl-sweep", "--triangles", "2", "--dof-budget", "10", "--out-dir", dir.string()});
  CHECK(r.code == cli::kSolverError);
  CHECK(slurp(dir / "trl_sweep.csv").find("failed") != std::string::npos);
}

TEST_CASE("grasp-predict") {
  const auto r = call({"grasp-predict", "--preset", "paper-V.B-fit", "--x", "1", "--json"});
  REQUIRE(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["payload"]["capacity_n"].get<double>() == doctest::Approx(1.18).epsilon(0.005));
  CHECK(j["payload"]["governing_mode"] == "Twist");

  const auto canonical = call({"grasp-predict", "--preset", "trl-grip-fit", "--x", "1", "--json"});
  CHECK(canonical.out == r.out);

  const auto feas = call({"grasp-predict", "--mass", "250", "--gripper", "trl"});
  CHECK(feas.code == cli::kOk);
  CHECK(feas.out.find("Feasible") != std::string::npos);
  const auto bench = call({"grasp-predict", "--mass", "250", "--gripper", "benchmark"});
  CHECK(bench.out.find("Infeasible") != std::string::npos);

  CHECK(call({"grasp-predict", "--preset", "trl-grip-fit", "--x", "1", "--r", "0"}).code ==
        cli::kConfigError);
  const auto missing = call({"grasp-predict", "--kappa", "10", "--x", "1"});
  CHECK(missing.code == cli::kConfigError);
  CHECK(missing.err.find("friction") != std::string::npos);
  CHECK(missing.err.find("contact_radius_mm") != std::string::npos);
  CHECK(call({"grasp-predict", "--preset", "nope", "--x", "1"}).code == cli::kConfigError);
}

TEST_CASE("mesh-export and validate") {
  const auto dir = scratch("mesh");
  const auto stl = dir / "trl30.stl";
  const auto r = call({"mesh-export", "--triangles", "30", "--out", stl.string(), "--mesh-json",
                       (dir / "trl30.json").string()});
  REQUIRE(r.code == cli::kOk);
  const auto size = fs::file_size(stl);
  const std::string bytes = slurp(stl);
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 80, 4);
  CHECK(size == 84 + 50 * static_cast<std::uintmax_t>(n));

  // Two triangles: the apex line carries vertices at x = 25 and x = 75.
  const auto two = dir / "trl2.stl";
  REQUIRE(call({"mesh-export", "--triangles", "2", "--out", two.string()}).code == cli::kOk);
  const std::string b2 = slurp(two);
  std::uint32_t n2 = 0;
  std::memcpy(&n2, b2.data() + 80, 4);
  bool at25 = false, at75 = false;
  for (std::uint32_t f = 0; f < n2; ++f) {
    for (int v = 0; v < 3; ++v) {
      float xyz[3];
      std::memcpy(xyz, b2.data() + 84 + 50 * f + 12 + 12 * v, 12);
      if (std::abs(xyz[2] + 12.0f) < 0.6f) {
        at25 |= std::abs(xyz[0] - 25.0f) < 0.6f;
        at75 |= std::abs(xyz[0] - 75.0f) < 0.6f;
      }
    }
  }
  CHECK(at25);
  CHECK(at75);

  CHECK(call({"mesh-export", "--out", "/proc/trlkit/none.stl"}).code == cli::kIoError);
  CHECK(call({"validate", "--mesh", (dir / "trl30.json").string()}).code == cli::kOk);
  CHECK(call({"validate", "--triangles", "5"}).code == cli::kOk);
  CHECK(call({"validate", "--mesh", (dir / "missing.json").string()}).code != cli::kOk);
}
