#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ocshuffle/io.hpp"

using namespace ocs;

TEST_CASE("FNV-1a") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(config_hash(json{{"b", 1}, {"a", 2}}) == config_hash(json{{"a", 2}, {"b", 1}}));
  CHECK(config_hash(json{{"a", 1}}) != config_hash(json{{"a", 2}}));
  CHECK(config_hash(json::object()).size() == 16);
}

TEST_CASE("alpha parsing") {
  CHECK(parse_alpha("0.25") == 0.25);
  CHECK(parse_alpha("golden") == doctest::Approx(2.0 / (1.0 + std::sqrt(5.0))).epsilon(1e-12));
  CHECK_THROWS_AS(parse_alpha("wide"), InvalidArgument);
}

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.experiment = "collide";
  c.n = 400;
  c.alpha = 0.5;
  c.ell = 30.0;
  c.trials = 1234;
  c.seed = 9;
  c.workers = 8;
  c.out = "somewhere";
  const json j = c.to_json();
  CHECK_FALSE(j.contains("out"));
  CHECK_FALSE(j.contains("workers"));
  const auto back = ExperimentConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.params().m() == 200);
  CHECK(config_hash(back.to_json()) == config_hash(j));

  ExperimentConfig w = c;
  w.workers = 1;
  CHECK(config_hash(w.to_json()) == config_hash(j));

  CHECK(ExperimentConfig::from_json(json{{"n", 100}, {"alpha", "golden"}}).params().m() == 61);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"n", "many"}}), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"n", 10}}).params(), InvalidArgument);
}

TEST_CASE("estimate record") {
  const auto j = estimate_json(Estimate::from_counts(3, 100));
  CHECK(j["successes"] == 3);
  CHECK(j["trials"] == 100);
  CHECK(j["ci"].size() == 2);
  CHECK(j["ci"][0].get<double>() <= 0.03);
}

TEST_CASE("output files carry the stamp") {
  const auto dir = std::filesystem::temp_directory_path() / "ocs_io_test";
  std::filesystem::remove_all(dir);
  {
    Output out(dir.string(), "metric", 5, json{{"n", 10}});
    out.record(json{{"value", 1}});
    out.csv("x.csv", "a,b\n1,2\n");
    CHECK(out.stamp_line().find("seed=5") != std::string::npos);
  }
  std::ifstream csv(dir / "x.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first.rfind("# seed=5,config_hash=", 0) == 0);
  CHECK(first.find("build=") != std::string::npos);
  std::getline(csv, first);
  CHECK(first == "a,b");

  std::ifstream rec(dir / "metric.jsonl");
  std::string line;
  std::getline(rec, line);
  const json r = json::parse(line);
  CHECK(r["value"] == 1);
  CHECK(r["seed"] == 5);
  CHECK(r["config_hash"] == config_hash(json{{"n", 10}}));
  std::filesystem::remove_all(dir);
}
