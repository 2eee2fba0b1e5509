#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "ocshuffle/montecarlo.hpp"
#include "ocshuffle/params.hpp"

namespace ocs {

using json = nlohmann::json;

// JSON schema (all keys optional):
//   experiment   string
//   n, m         integers
//   alpha        number or "golden"; m = floor(alpha * n) when m is absent
//   ell          number
//   profile      "desk" | "paper"
//   trials       integer
//   seed         integer
//   workers      integer
//   delta        number
//   allow_large  bool
//   out          string, output directory
struct ExperimentConfig {
  std::string experiment;
  int n = 0;
  std::optional<int> m;
  std::optional<double> alpha;
  double ell = 0.0;
  std::string profile = "desk";
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  int workers = 0;
  double delta = 0.25;
  bool allow_large = false;
  std::string out;

  ShuffleParams params() const;  // InvalidArgument when neither m nor alpha resolves
  json to_json() const;          // the fields that define the result, without out and workers
  static ExperimentConfig from_json(const json& j);
};

double parse_alpha(const std::string& text);  // a number or "golden"

std::uint64_t fnv1a64(const std::string& bytes);
// FNV-1a of the key-sorted dump, as 16 hex digits.
std::string config_hash(const json& config);
const char* build_id();

json estimate_json(const Estimate& e);
json fit_json(const ScalingFit& f);

// JSON-lines records and CSV files stamped with seed, config hash and build id.
// Records go to DIR/<command>.jsonl with an output directory, else stdout.
class Output {
 public:
  Output(const std::string& dir, const std::string& command, std::uint64_t seed, const json& config);

  void record(json body);
  // Writes DIR/<name> with a provenance comment line ahead of the body. No-op without a directory.
  void csv(const std::string& name, const std::string& body) const;
  std::string stamp_line() const;
  const std::string& hash() const { return hash_; }

 private:
  std::string dir_, command_, hash_;
  std::uint64_t seed_;
  json config_;
  std::ofstream jsonl_;
};

}  // namespace ocs
