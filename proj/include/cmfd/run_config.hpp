#pragma once

#include <cstdint>
#include <string>

#include "cmfd/descriptor.hpp"
#include "cmfd/harris.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/scale_space.hpp"

namespace cmfd {

// Everything the pipeline needs, with defaults matching the reference
// parameter set (4 octaves, 4 intervals, beta 1.25, k 0.05, threshold
// fraction 0.02).
struct RunConfig {
  PyramidConfig pyramid;
  HarrisConfig harris;
  DescriptorConfig descriptor;
  MatcherConfig matcher;
  int orientation_radius = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string run_config_to_json(const RunConfig& cfg);

// Parses a (possibly partial) JSON object; absent keys keep their defaults.
RunConfig run_config_from_json(const std::string& text);

RunConfig load_run_config(const std::string& path);

}  // namespace cmfd
