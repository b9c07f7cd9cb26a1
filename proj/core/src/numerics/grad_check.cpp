#include "depthcap/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depthcap/errors.hpp"

namespace depthcap::num {
namespace {

double loss_value(Tape& tape, Var loss) {
  const double v = tape.value(loss)(0, 0);
  if (!std::isfinite(v)) throw EvaluationError("grad_check: loss is not finite");
  return v;
}

std::vector<std::size_t> entries_to_check(std::size_t n, const GradCheckOptions& options,
                                          SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (options.max_entries_per_param == 0 || n <= options.max_entries_per_param) return idx;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < options.max_entries_per_param; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(options.max_entries_per_param);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const ScalarGraph& f, const std::vector<Parameter*>& params,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw ArgumentError("grad_check: step must be positive");
  for (Parameter* p : params) p->grad = Matrix(p->value.rows(), p->value.cols());

  Tape tape;
  const Var loss = f(tape);
  loss_value(tape, loss);
  tape.backward(loss);

  GradCheckReport report;
  SplitMix64 rng(options.sample_seed);
  for (Parameter* p : params) {
    const Matrix analytic = p->grad;
    for (std::size_t i : entries_to_check(p->value.size(), options, rng)) {
      double& slot = p->value.data()[i];
      const double saved = slot;
      slot = saved + options.step;
      tape.replay();
      const double plus = loss_value(tape, loss);
      slot = saved - options.step;
      tape.replay();
      const double minus = loss_value(tape, loss);
      slot = saved;

      const double numeric = (plus - minus) / (2.0 * options.step);
      const double err = relative_error(analytic.data()[i], numeric, options.magnitude_floor);
      ++report.checked;
      if (err > report.max_rel_error || report.checked == 1) {
        report.max_rel_error = std::max(report.max_rel_error, err);
        if (err >= report.max_rel_error) {
          report.worst = {p->name, i, analytic.data()[i], numeric, err};
        }
      }
    }
  }
  tape.replay();
  report.passed = report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace depthcap::num
