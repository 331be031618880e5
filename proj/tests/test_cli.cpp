#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fwdrel/commands.hpp"
#include "fwdrel/config.hpp"

using namespace fwdrel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fwdrel_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_config(const std::string& out) {
  RunConfig c;
  c.dt = 0.02;
  c.n_paths = 64;
  c.output = out;
  return c;
}

int run(const std::string& cmd, const RunConfig& c, std::string* err_text = nullptr,
        const std::string& target = {}) {
  std::ostringstream out, err;
  const int code = run_command(cmd, c, out, err, target);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig a;
  CHECK(config_from_json(to_json(a)) == a);

  RunConfig b;
  b.setting = Setting::Diversification;
  b.model.mu1 = Coefficient::tanh_factor(0.08, 0.02, 1.5, 2);
  b.model.sigma2 = Coefficient::linear(0.2, 0.05);
  b.model.bounds = {0.01, 5.0};
  b.pref1 = {PreferenceSpec::Kind::Measure, 2.0, {{0.5, 1.0}, {2.0, 0.5}}};
  b.pref2 = {PreferenceSpec::Kind::Log, 1.0, {}};
  b.strategy2 = {StrategySpec::Kind::Constant, {0.25, -0.75}};
  b.verify_criteria = {1, 6};
  b.x1 = 1.5;
  const RunConfig back = config_from_json(to_json(b));
  CHECK(back == b);
  CHECK(to_json(back) == to_json(b));
}

TEST_CASE("config parsing rejects bad input") {
  using nlohmann::json;
  CHECK_THROWS_AS(config_from_json(json{{"sead", 1}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"grid", {{"steps", 10}}}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"seed", "x"}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"setting", "both"}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json::array()), InvalidInput);
  CHECK_THROWS_AS(coefficient_from_json(json{{"type", "cubic"}}), InvalidInput);

  auto invalid = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), InvalidInput);
  };
  invalid([](RunConfig& c) { c.rho = 1.0; });
  invalid([](RunConfig& c) { c.competition.theta1 = 0.0; });
  invalid([](RunConfig& c) { c.pref1.gamma = 1.0; });
  invalid([](RunConfig& c) { c.dt = 0.3; });
  invalid([](RunConfig& c) { c.n_paths = 1001; });
  invalid([](RunConfig& c) { c.strategy1.kind = StrategySpec::Kind::Nash; });
  invalid([](RunConfig& c) { c.strategy2.kind = StrategySpec::Kind::BestResponse; });
  invalid([](RunConfig& c) { c.pref1 = {PreferenceSpec::Kind::Measure, 2.0, {{0.5, 1.0}}}; });
  invalid([](RunConfig& c) { c.verify_criteria = {10}; });
}

TEST_CASE("load_config reads a file") {
  const fs::path dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"rho": -0.2, "seed": 5, "grid": {"dt": 0.01}})";
  const RunConfig c = load_config((dir / "c.json").string());
  CHECK(c.rho == -0.2);
  CHECK(c.seed == 5);
  CHECK(c.dt == 0.01);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_config((dir / "bad.json").string()), InvalidInput);
  fs::remove_all(dir);
}

TEST_CASE("simulate writes CSVs and a manifest") {
  const fs::path dir = scratch("simulate");
  const RunConfig c = small_config(dir.string());
  REQUIRE(run("simulate", c) == kOk);
  const std::string csv = slurp(dir / "simulate_mean.csv");
  CHECK(csv.rfind("t,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);  // header plus 51 nodes
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("seed") == c.seed);
  CHECK(m.at("version") == kVersion);
  CHECK(m.at("verdicts").is_array());
  CHECK(config_from_json(m.at("config")) == c);
  std::ostringstream out, err;
  CHECK(run_command("report", c, out, err, dir.string()) == kOk);
  CHECK(out.str().find("simulate_mean.csv: 51 rows") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("simulate output is identical across thread counts") {
  const fs::path a = scratch("threads1"), b = scratch("threads3");
  RunConfig c = small_config(a.string());
  c.n_paths = 200;
  REQUIRE(run("simulate", c) == kOk);
  c.threads = 3;
  c.output = b.string();
  REQUIRE(run("simulate", c) == kOk);
  CHECK(slurp(a / "simulate_mean.csv") == slurp(b / "simulate_mean.csv"));
  CHECK(slurp(a / "simulate_path0.csv") == slurp(b / "simulate_path0.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("zero strategies keep every wealth column constant") {
  const fs::path dir = scratch("zero");
  RunConfig c = small_config(dir.string());
  c.strategy1 = {StrategySpec::Kind::Constant, {0.0, 0.0}};
  c.strategy2 = {StrategySpec::Kind::Constant, {0.0, 0.0}};
  c.x1 = 2.0;
  REQUIRE(run("simulate", c) == kOk);
  std::istringstream in(slurp(dir / "simulate_path0.csv"));
  std::string header, line;
  std::getline(in, header);
  std::vector<std::string> cols;
  {
    std::istringstream h(header);
    for (std::string s; std::getline(h, s, ',');) cols.push_back(s);
  }
  const auto w1 = std::find(cols.begin(), cols.end(), "wealth1") - cols.begin();
  const auto r1 = std::find(cols.begin(), cols.end(), "relative_wealth1") - cols.begin();
  REQUIRE(w1 < static_cast<long>(cols.size()));
  REQUIRE(r1 < static_cast<long>(cols.size()));
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::istringstream row(line);
    for (std::string s; std::getline(row, s, ',');) v.push_back(std::stod(s));
    CHECK(v[w1] == 2.0);
    CHECK(v[r1] == 2.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("best-response and nash commands report verdicts") {
  const fs::path dir = scratch("nash");
  RunConfig c = small_config(dir.string());
  c.n_paths = 1000;
  c.dt = 0.05;
  CHECK(run("best-response", c) == kOk);
  c.strategy1.kind = c.strategy2.kind = StrategySpec::Kind::Nash;
  c.rho = 0.0;
  CHECK(run("nash", c) == kOk);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("verdicts").size() == 3);
  CHECK(m.at("verdicts").at(0).at("passed") == true);
  fs::remove_all(dir);
}

TEST_CASE("singular Nash system exits with the no-equilibrium code") {
  const fs::path dir = scratch("noeq");
  RunConfig c = small_config(dir.string());
  c.setting = Setting::Diversification;
  c.strategy1.kind = c.strategy2.kind = StrategySpec::Kind::Nash;
  c.pref1.gamma = c.pref2.gamma = 0.5;
  c.competition = {1.0, 1.0};
  std::string err;
  CHECK(run("nash", c, &err) == kNoEquilibrium);
  CHECK(err.find("determinant") != std::string::npos);
  CHECK(!fs::exists(dir / "manifest.json"));
}

TEST_CASE("invalid input and missing artifacts") {
  RunConfig c = small_config(scratch("invalid").string());
  c.rho = 2.0;
  CHECK(run("simulate", c) == kInvalidInput);
  CHECK(run("frobnicate", small_config(scratch("unknown").string())) == kInvalidInput);

  const fs::path empty = scratch("empty");
  fs::create_directories(empty);
  std::string err;
  CHECK(run("report", c, &err, empty.string()) == kMissingArtifact);
  CHECK(err.find("manifest.json") != std::string::npos);

  // a manifest listing a file that is gone
  const fs::path dir = scratch("partial");
  REQUIRE(run("simulate", small_config(dir.string())) == kOk);
  fs::remove(dir / "simulate_path0.csv");
  CHECK(run("report", c, nullptr, dir.string()) == kMissingArtifact);
  fs::remove_all(dir);
  fs::remove_all(empty);
}

TEST_CASE("verify runs a subset of criteria") {
  const fs::path dir = scratch("verify");
  RunConfig c = small_config(dir.string());
  c.dt = 1e-2;
  c.verify_criteria = {4, 5, 8};
  REQUIRE(run("verify", c) == kOk);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  REQUIRE(m.at("verdicts").size() == 3);
  for (const auto& v : m.at("verdicts")) CHECK(v.at("passed") == true);
  fs::remove_all(dir);
}
