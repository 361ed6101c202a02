#pragma once

#include <functional>
#include <string>
#include <vector>

#include "catport/dense_state.hpp"

namespace catport::cli {

enum class Level { Fast, Full };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  Level level = Level::Fast;
  /// Fault hook: run the dense engine with the flipped beam-splitter sign.
  BsConvention dense_bs = BsConvention::Standard;
};

/// Runs every invariant check in order; stops at nothing, the caller decides.
std::vector<CheckResult> run_validation(const ValidateOptions& opts,
                                        const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace catport::cli
