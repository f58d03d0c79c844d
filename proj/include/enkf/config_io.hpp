#pragma once

#include <string>
#include <vector>

#include "enkf/harness.hpp"

namespace enkf {

/// Everything the CLI can be told, either by flags or by a JSON file whose
/// keys mirror the long flag names (dashes become underscores).
struct RunOptions {
  ExperimentConfig experiment;
  std::vector<double> deltas{1.01, 1.02, 1.05, 1.08};
  std::vector<double> radii{2, 4, 6, 10, 15, 20, 30};
  bool parallel = false;
  unsigned threads = 0;
  std::string out;
};

/// Overlays the keys present in `json_text` onto `opts`. Unknown keys are a
/// ValidationError.
void merge_json(RunOptions& opts, const std::string& json_text);

/// Full JSON rendering of `opts`, accepted back by merge_json.
std::string to_json(const RunOptions& opts);

TaperKind parse_taper(const std::string& name);
RadiusConvention parse_radius_convention(const std::string& name);

}  // namespace enkf
