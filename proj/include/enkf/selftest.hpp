#pragma once

#include <string>
#include <vector>

namespace enkf {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks on seeded small problems (well under a second).
std::vector<SelfTestResult> run_selftest(unsigned seed = 7);

}  // namespace enkf
