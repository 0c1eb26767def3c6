#include <doctest.h>

#include <map>

#include "ccic/config.hpp"
#include "ccic/errors.hpp"

using namespace ccic;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults carry the reference simulation parameters") {
  RunConfig cfg;
  std::map<std::string, std::string> entries;
  for (auto& [k, v] : config_entries(cfg)) entries[k] = v;

  CHECK(entries.at("topology.area_width_m") == "300");
  CHECK(entries.at("topology.area_height_m") == "200");
  CHECK(entries.at("topology.nodes") == "100");
  CHECK(entries.at("topology.clusters") == "4");
  CHECK(entries.at("energy.energy_per_bit_j") == "5e-07"); // 0.5 uJ/bit
  CHECK(entries.at("timers.pit_lifetime_s") == "4");
  CHECK(entries.at("packet.interest_size_bytes") == "48");
  CHECK(entries.at("packet.data_size_bytes") == "96");
  CHECK(entries.at("run.duration_s") == "1800");
  CHECK(entries.at("medium.datarate_bps") == "250000");
  CHECK(entries.at("strategy.strategy") == "ccic");
}

TEST_CASE("parse accepts sections, comments and overrides") {
  const char* text =
      "# a comment\n"
      "[topology]\n"
      "clusters = 2\n"
      "nodes = 10\n"
      "\n"
      "[run]\n"
      "seed = 42\n"
      "duration_s = 60\n"
      "checkpoints = 10 20\n"
      "[mobility]\n"
      "move = 5 A1 12.5 30\n"
      "[strategy]\n"
      "strategy = vanilla\n";
  RunConfig cfg = parse_config_text(text, "test.cfg");
  CHECK(cfg.clusters == 2);
  CHECK(cfg.nodes == 10);
  CHECK(cfg.seed == 42);
  CHECK(cfg.duration_s == 60);
  CHECK(cfg.strategy == Strategy::VanillaFlooding);
  REQUIRE(cfg.checkpoints_s.size() == 2);
  CHECK(cfg.checkpoints_s[1] == 20.0);
  REQUIRE(cfg.moves.size() == 1);
  CHECK(cfg.moves[0].node_id == "A1");
  CHECK(cfg.moves[0].to.lat == 12.5);
}

TEST_CASE("errors carry the offending line and key") {
  try {
    parse_config_text("[topology]\nclusters = 2\nbogus_key = 1\n", "bad.cfg");
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
    CHECK(std::string(e.what()).find("bad.cfg:3") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("clusters : 2\n", "x"), Error);
  CHECK_THROWS_AS(parse_config_text("[topology]\nclusters = two\n", "x"), Error);
}

TEST_CASE("render echoes a parseable canonical config") {
  RunConfig cfg;
  cfg.clusters = 3;
  cfg.nodes = 31;
  cfg.seed = 77;
  cfg.strategy = Strategy::VanillaFlooding;
  cfg.checkpoints_s = {5, 10};
  cfg.moves.push_back(MoveCommand{4.0, "A1", {1.0, 2.0}});
  RunConfig back = parse_config_text(render_config(cfg), "echo");
  CHECK(config_entries(back) == config_entries(cfg));
  CHECK(back.checkpoints_s == cfg.checkpoints_s);
  REQUIRE(back.moves.size() == 1);
  CHECK(back.moves[0].node_id == "A1");
}

TEST_CASE("apply_override changes one key") {
  RunConfig cfg;
  apply_override(cfg, "workload.interest_rate_per_s=14");
  CHECK(cfg.interest_rate_per_s == 14.0);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "no.such.key=1"), Error);

  apply_override(cfg, "workload.arrival=poisson");
  CHECK_NOTHROW(cfg.validate());
  apply_override(cfg, "workload.arrival=bursty");
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("validation rejects inconsistent setups") {
  RunConfig cfg;
  cfg.nodes = 4;
  cfg.clusters = 4; // no room for any child
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = RunConfig{};
  cfg.csma_backoff_min_s = 0.01;
  cfg.csma_backoff_max_s = 0.001;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = RunConfig{};
  cfg.interest_size_bytes = 300; // beyond the MTU
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = RunConfig{};
  cfg.hop_limit = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_SUITE_END();
