#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdlab/bracket.hpp"
#include "mdlab/group.hpp"

namespace mdlab {

// Every tunable default in one place. Precedence: these values, then a JSON
// config file, then MDLAB_<KEY> environment variables, then command-line flags.
struct Config {
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::size_t d = 2;
  std::size_t radius = 2;
  std::size_t window_radius = 1;
  std::size_t max_ball_size = 2'000'000;
  std::size_t length_horizon = 14;
  std::size_t schur_max_iterations = 500;
  std::size_t exhaustive_cap = 200'000;
  std::size_t samples = 20'000;
  double cert_tol = 1e-9;
  std::size_t fourier_nodes = 0;
  std::size_t family_radius = 6;
  std::size_t family_rank = 2;
  double cr_step = 1e-3;

  // Throws ValidationError on unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::vector<std::pair<std::string, std::string>> entries() const;
  void apply_json(const nlohmann::json& j);
  void apply_env();
  // "# key = value" lines.
  std::string header() const;

  GroupLimits limits() const;
  BracketOptions bracket_options() const;
};

}  // namespace mdlab
