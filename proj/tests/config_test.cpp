#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "urnkit/config.hpp"

using namespace urnkit;

namespace {

const char* kSample = R"(# fixation experiment
[weights]
kind = polynomial
rho = 2

[run]
d = 2
horizon_ticks = 1000
runs = 50
master_seed = 7
fixation_window = 100
diagnostics = true
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse sections, comments and overrides") {
  ConfigMap map = ConfigMap::parse_string(kSample);
  CHECK(map.get_string("weights.kind") == "polynomial");
  CHECK(map.get_double("weights.rho") == 2.0);
  CHECK(map.get_int("run.d") == 2);
  CHECK(map.get_uint64("run.master_seed") == 7);
  CHECK(map.get_bool("run.diagnostics"));
  CHECK_FALSE(map.contains("run.threads"));
  CHECK(map.get_int_or("run.threads", 1) == 1);

  map.set("run.d", "3");
  CHECK(map.get_int("run.d") == 3);
  CHECK_THROWS_AS(map.set("nodot", "1"), ConfigError);
}

TEST_CASE("parse errors carry location") {
  CHECK_THROWS_WITH_AS(ConfigMap::parse_string("key = 1\n"), doctest::Contains("section"),
                       ConfigError);
  CHECK_THROWS_AS(ConfigMap::parse_string("[run\nd = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigMap::parse_string("[run]\nno equals here\n"), ConfigError);
  ConfigMap map = ConfigMap::parse_string("[run]\nd = x\n");
  CHECK_THROWS_AS(map.get_int("run.d"), ConfigError);
  CHECK_THROWS_AS(map.get_int("run.absent"), ConfigError);
}

TEST_CASE("typed getters") {
  ConfigMap map = ConfigMap::parse_string("[a]\nx = 2.5\nn = -3\nb = no\nlist = 1, 2.5, 4\n");
  CHECK(map.get_double("a.x") == 2.5);
  CHECK(map.get_int("a.n") == -3);
  CHECK_FALSE(map.get_bool("a.b"));
  const auto list = map.get_double_list("a.list");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 2.5);
  CHECK_THROWS_AS(map.get_int("a.x"), ConfigError);
  CHECK_THROWS_AS(map.get_uint64("a.n"), ConfigError);
}

TEST_CASE("weights from config") {
  {
    ConfigMap map = ConfigMap::parse_string("[weights]\nkind = constant\nc = 2\n");
    const auto seq = weights_from_config(map, 1);
    CHECK(seq.kind() == WeightKind::Constant);
    CHECK(seq.weight_at(5) == 2.0);
  }
  {
    ConfigMap map = ConfigMap::parse_string("[weights]\nkind = counterexample\nrho = 2\n");
    const auto seq = weights_from_config(map, 3);
    CHECK(seq.block() == 3);  // falls back to the run d
    CHECK(seq.weight_at(3) == 1.0);
  }
  {
    ConfigMap map = ConfigMap::parse_string(
        "[weights]\nkind = table\nvalues = 1, 2, 4\ntail_rule = extend-exponential\ntail_rho = "
        "2\n");
    const auto seq = weights_from_config(map, 1);
    CHECK(seq.kind() == WeightKind::Table);
    CHECK(seq.weight_at(4) == doctest::Approx(16.0));
  }
  {
    ConfigMap map = ConfigMap::parse_string("[weights]\nkind = nope\n");
    CHECK_THROWS_AS(weights_from_config(map, 1), ConfigError);
  }
  {
    ConfigMap map = ConfigMap::parse_string("[weights]\nkind = table\n");
    CHECK_THROWS_AS(weights_from_config(map, 1), ConfigError);
  }
  {
    // invalid parameter surfaces as a config error
    ConfigMap map = ConfigMap::parse_string("[weights]\nkind = polynomial\nrho = -2\n");
    CHECK_THROWS_AS(weights_from_config(map, 1), ConfigError);
  }
}

TEST_CASE("weights values file") {
  const std::string path = "test_weights_values.txt";
  {
    std::ofstream out(path);
    out << "# comment\n1.0\n2.0\n4.0\n";
  }
  ConfigMap map = ConfigMap::parse_string("[weights]\nkind = table\nvalues_file = " + path + "\n");
  const auto seq = weights_from_config(map, 1);
  CHECK(seq.values().size() == 3);
  CHECK(seq.weight_at(2) == 4.0);
  CHECK(seq.source() == path);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_weight_values("definitely_missing_file.txt"), ConfigError);
}

TEST_CASE("experiment from config validates") {
  ConfigMap map = ConfigMap::parse_string(kSample);
  const auto cfg = experiment_from_config(map);
  CHECK(cfg.d == 2);
  CHECK(cfg.horizon_ticks == 1000);
  CHECK(cfg.runs == 50);
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.fixation_window == 100);

  map.set("run.fixation_window", "5000");  // beyond the horizon
  CHECK_THROWS_AS(experiment_from_config(map), ConfigError);

  ConfigMap missing = ConfigMap::parse_string("[weights]\nkind = constant\n");
  CHECK_THROWS_AS(experiment_from_config(missing), ConfigError);  // no horizon
}

}  // TEST_SUITE
