#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fracext/cli.hpp"

using namespace fracext;
using namespace fracext::cli;

namespace {

RunConfig parse(std::vector<std::string> args) {
  std::vector<const char*> argv{"fracext"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_arguments(static_cast<int>(argv.size()), argv.data());
}

json strip_timing(json record) {
  record.erase("wall_time_ms");
  return record;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("argument parsing types values") {
  const auto c = parse({"deriv", "--fn", "sine", "--s", "0.4", "--oracle", "--t", "-1.5"});
  CHECK(c.command == "deriv");
  CHECK(c.params["fn"] == "sine");
  CHECK(c.params["s"] == 0.4);
  CHECK(c.params["oracle"] == true);
  CHECK(c.params["t"] == -1.5);
  const auto l = parse({"compose", "--t", "0,1,2"});
  CHECK(l.params["t"].size() == 3);
  CHECK_THROWS_AS(parse({"nonsense"}), Error);
  CHECK_THROWS_AS(parse({"a2", "stray"}), Error);
}

TEST_CASE("config file values are overridden by flags") {
  const std::string path = "fracext_cli_config.json";
  {
    std::ofstream out(path);
    out << R"({"params": {"s": 0.3, "n": 32}, "seed": 9})";
  }
  const auto c = parse({"a2", "--config", path, "--s", "0.6"});
  CHECK(c.params["s"] == 0.6);
  CHECK(c.params["n"] == 32);
  CHECK(c.seed == 9);
}

TEST_CASE("sweep ranges") {
  const auto c = parse({"a2", "--sweep", "s=0.1:0.5:0.2", "--sweep", "family=all,anchored"});
  CHECK(c.sweep["s"] == json::array({0.1, 0.3, 0.5}));
  CHECK(c.sweep["family"].size() == 2);
}

TEST_CASE("records and exit codes") {
  RunConfig c;
  c.command = "a2";
  c.params = {{"s", 0.5}};
  auto r = run(c);
  CHECK(r.exit_code == 0);
  CHECK(r.record["result"]["value"] == 1.0);
  for (const char* key : {"command", "params", "result", "error_bound", "warnings", "version", "wall_time_ms"}) {
    CHECK(r.record.contains(key));
  }

  c.params["bogus"] = 1;
  r = run(c);
  CHECK(r.exit_code == 2);
  CHECK(r.record["error"]["category"] == "ConfigInvalid");

  RunConfig d;
  d.command = "deriv";
  d.params = {{"fn", "bump"}, {"s", 1.5}};
  r = run(d);
  CHECK(r.exit_code == 3);
  CHECK(r.record["error"]["category"] == "MissingDerivative");
}

TEST_CASE("records round-trip into configs") {
  RunConfig c;
  c.command = "deriv";
  c.params = {{"fn", "sine"}, {"s", 0.3}, {"t", 0.2}};
  const auto first = run(c);
  const auto reparsed = json::parse(first.record.dump());
  RunConfig again;
  again.command = reparsed["command"];
  again.params = reparsed["params"];
  again.seed = reparsed["seed"];
  again.validate();
  CHECK(strip_timing(run(again).record) == strip_timing(first.record));
}

TEST_CASE("csv quoting and precision") {
  Table t{{"name", "value"}, {{"a,b", 0.1}, {"say \"hi\"", 1.0 / 3.0}, {nullptr, true}}};
  CHECK(to_csv(t) == "name,value\r\n\"a,b\",0.10000000000000001\r\n\"say \"\"hi\"\"\",0.33333333333333331\r\n,true\r\n");
}

TEST_CASE("sweeps are ordered and independent of the thread count") {
  RunConfig c;
  c.command = "a2";
  c.sweep = {{"s", {0.7, 0.2, 0.5}}, {"n", {16, 8}}};
  c.threads = 1;
  const auto one = sweep(c);
  c.threads = 4;
  const auto four = sweep(c);
  REQUIRE(one.tables.size() == 1);
  CHECK(to_csv(one.tables[0].second) == to_csv(four.tables[0].second));
  const auto& rows = one.tables[0].second.rows;
  CHECK(rows.size() == 6);
  CHECK(rows.front()[0] == 8);
  CHECK(rows.front()[1] == 0.2);
  CHECK(rows.back()[0] == 16);
  CHECK(rows.back()[1] == 0.7);
}

TEST_CASE("sweep failures are flagged per row") {
  RunConfig c;
  c.command = "a2";
  c.sweep = {{"s", {0.5, 1.5}}};
  const auto r = sweep(c);
  CHECK(r.exit_code == 3);
  const auto& rows = r.tables[0].second.rows;
  CHECK(rows[0][1] == "ok");
  CHECK(rows[1][1] == "failed");
}

TEST_CASE("binary output is byte-identical across runs") {
  const std::string cli = FRACEXT_CLI;
  const std::string args = " extend --fn bump --s 0.4 --x 0.5 --t 0.1 --reflection_checks 4 --seed 7";
  for (const char* out : {"fracext_det_a", "fracext_det_b"}) {
    REQUIRE(std::system((cli + args + " --output " + out).c_str()) == 0);
  }
  auto a = json::parse(slurp("fracext_det_a.json"));
  auto b = json::parse(slurp("fracext_det_b.json"));
  CHECK(strip_timing(a).dump() == strip_timing(b).dump());
  CHECK(slurp("fracext_det_a_reflection.csv") == slurp("fracext_det_b_reflection.csv"));
  CHECK(a["result"]["reflection_max_difference"].get<double>() < 1e-8);
}
