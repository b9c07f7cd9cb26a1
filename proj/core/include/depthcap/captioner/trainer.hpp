#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "depthcap/captioner/model.hpp"

namespace depthcap::cap {

struct TrainingExample {
  const PreparedScene* scene = nullptr;
  std::vector<TokenRef> targets;
};

// One example per (record, reference caption), in record order.
std::vector<TrainingExample> make_examples(const Dataset& data, const CaptionModel& model);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // Applies one update from the gradients currently held in `store`.
  void step(num::ParamStore& store, double lr);
  std::size_t steps_taken() const noexcept { return t_; }

 private:
  AdamOptions options_;
  std::size_t t_ = 0;
  std::vector<num::Matrix> m_;
  std::vector<num::Matrix> v_;
};

struct StepResult {
  double loss = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  double lr = 0.0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

class Trainer {
 public:
  explicit Trainer(CaptionModel& model);

  // Mean of the per-example losses, then one optimizer update.
  StepResult train_step(std::span<const TrainingExample> batch);
  // Loss and accuracy without touching parameters or optimizer state.
  StepResult evaluate(std::span<const TrainingExample> batch) const;

  // Learning rate used by the next step.
  double current_lr() const;
  std::size_t steps_taken() const noexcept { return step_; }

 private:
  CaptionModel& model_;
  Adam adam_;
  std::size_t step_ = 0;
};

// Deterministic batching: step s takes batch_size examples starting at
// (s * batch_size) mod n, wrapping around. The callback may return false to
// stop early.
using StepCallback = std::function<bool(std::size_t step, const StepResult&)>;
StepResult train(CaptionModel& model, const std::vector<TrainingExample>& examples, std::size_t steps,
                 const StepCallback& on_step = {});

}  // namespace depthcap::cap
