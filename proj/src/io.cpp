#include "ocshuffle/io.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include <fmt/format.h>

#ifndef OCS_BUILD_ID
#define OCS_BUILD_ID "unknown"
#endif

namespace ocs {

double parse_alpha(const std::string& text) {
  if (text == "golden" || text == "phi") return kGoldenPhi;
  try {
    std::size_t used = 0;
    const double a = std::stod(text, &used);
    if (used != text.size()) throw InvalidArgument("bad alpha: " + text);
    return a;
  } catch (const std::logic_error&) {
    throw InvalidArgument("bad alpha: " + text);
  }
}

ShuffleParams ExperimentConfig::params() const {
  if (m) return ShuffleParams(n, *m);
  if (alpha) return ShuffleParams::from_alpha(n, *alpha);
  throw InvalidArgument("either m or alpha is required");
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["n"] = n;
  if (m) j["m"] = *m;
  if (alpha) j["alpha"] = *alpha;
  j["ell"] = ell;
  j["profile"] = profile;
  j["trials"] = trials;
  j["seed"] = seed;
  j["delta"] = delta;
  j["allow_large"] = allow_large;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("m")) c.m = j["m"].get<int>();
    if (j.contains("alpha")) {
      const auto& a = j["alpha"];
      c.alpha = a.is_string() ? parse_alpha(a.get<std::string>()) : a.get<double>();
    }
    if (j.contains("ell")) c.ell = j["ell"].get<double>();
    if (j.contains("profile")) c.profile = j["profile"].get<std::string>();
    if (j.contains("trials")) c.trials = j["trials"].get<std::int64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("allow_large")) c.allow_large = j["allow_large"].get<bool>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) { return fmt::format("{:016x}", fnv1a64(config.dump())); }

const char* build_id() { return OCS_BUILD_ID; }

json estimate_json(const Estimate& e) {
  return json{{"trials", e.trials},         {"successes", e.successes},
              {"p_hat", e.p_hat},           {"ci", {e.ci_lo, e.ci_hi}},
              {"stop_reason", e.stop_reason}, {"ci_target_met", e.ci_target_met}};
}

json fit_json(const ScalingFit& f) {
  json pts = json::array();
  for (const auto& q : f.points) pts.push_back({{"n", q.n}, {"p", q.p}, {"weight", q.weight}});
  return json{{"exponent", f.exponent},
              {"intercept", f.intercept},
              {"stderr", f.stderr_},
              {"points", pts},
              {"warnings", f.warnings}};
}

Output::Output(const std::string& dir, const std::string& command, std::uint64_t seed, const json& config)
    : dir_(dir), command_(command), hash_(config_hash(config)), seed_(seed), config_(config) {
  if (!dir_.empty()) {
    std::filesystem::create_directories(dir_);
    jsonl_.open(std::filesystem::path(dir_) / (command_ + ".jsonl"), std::ios::trunc);
    if (!jsonl_) throw InvalidArgument("cannot write to " + dir_);
  }
}

void Output::record(json body) {
  body["seed"] = seed_;
  body["config_hash"] = hash_;
  body["build"] = build_id();
  if (!body.contains("params")) body["params"] = config_;
  const std::string line = body.dump();
  if (jsonl_.is_open())
    jsonl_ << line << '\n';
  else
    std::cout << line << '\n';
}

std::string Output::stamp_line() const { return fmt::format("# seed={},config_hash={},build={}\n", seed_, hash_, build_id()); }

void Output::csv(const std::string& name, const std::string& body) const {
  if (dir_.empty()) return;
  std::ofstream f(std::filesystem::path(dir_) / name, std::ios::trunc);
  f << stamp_line() << body;
}

}  // namespace ocs
