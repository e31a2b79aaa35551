#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "textdet/candidates.hpp"
#include "textdet/eval.hpp"
#include "textdet/filtering.hpp"
#include "textdet/synth.hpp"

namespace textdet {

/// Every tunable threshold of the pipeline.
struct RunConfig {
  CandidateParams candidates;
  FilterParams filter;
  /// Saliency is averaged over rescalings to these heights; empty means the
  /// native image height only.
  std::vector<int> scales{200, 500, 1000};
  RotatedProtocol rotated;
  AxisProtocol axis;

  void validate() const;
};

/// Flat `key=value` text, one key per line, every RunConfig field present.
std::string format_config(const RunConfig& config);

/// Starts from defaults; unknown keys and out-of-range values throw
/// kInvalidArgument. '#' starts a comment line.
RunConfig parse_config(const std::string& text, const std::string& source = "<text>");
RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& config);

/// Applies one `key=value` assignment.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

std::string format_synth_spec(const SynthSpec& spec);
SynthSpec parse_synth_spec(const std::string& text, const std::string& source = "<text>");
SynthSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace textdet
