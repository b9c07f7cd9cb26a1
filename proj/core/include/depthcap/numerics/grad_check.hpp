#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "depthcap/numerics/params.hpp"
#include "depthcap/numerics/tape.hpp"

namespace depthcap::num {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor for the relative error, so entries whose true
  // gradient is ~0 are judged on absolute error instead.
  double magnitude_floor = 1e-5;
  // 0 checks every entry; otherwise at most this many entries per parameter,
  // sampled without replacement.
  std::size_t max_entries_per_param = 0;
  std::uint64_t sample_seed = 0x5eed;
};

struct GradCheckEntry {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  GradCheckEntry worst;
  std::size_t checked = 0;
  bool passed = true;
};

// Builds a scalar (1x1) loss on the given tape from the current parameter values.
using ScalarGraph = std::function<Var(Tape&)>;

double relative_error(double analytic, double numeric, double floor);

// Compares reverse-mode gradients with central differences
// (f(p+h) - f(p-h)) / 2h. The graph is built once; perturbed losses are
// obtained by replaying the tape. Throws EvaluationError if the loss is
// ever non-finite.
GradCheckReport grad_check(const ScalarGraph& f, const std::vector<Parameter*>& params,
                           const GradCheckOptions& options = {});

}  // namespace depthcap::num
