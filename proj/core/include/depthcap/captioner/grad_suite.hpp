#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depthcap/captioner/config.hpp"
#include "depthcap/numerics/grad_check.hpp"

namespace depthcap::cap {

struct GradSuiteResult {
  std::string name;  // features, defum, sgam, captioner
  num::GradCheckReport report;
};

// Finite-difference checks of each learned stage on one random micro scene
// (N=1 object, M=3 OCR tokens, config.K concepts). Every graph is reduced to a
// scalar by a random weighting of its output rows.
std::vector<GradSuiteResult> run_grad_suites(const ModelConfig& config, std::uint64_t seed,
                                             const num::GradCheckOptions& options);

}  // namespace depthcap::cap
