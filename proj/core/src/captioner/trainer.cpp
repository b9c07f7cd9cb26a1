#include "depthcap/captioner/trainer.hpp"

#include <cmath>

#include "depthcap/errors.hpp"
#include "depthcap/eval/tokenize.hpp"

namespace depthcap::cap {

std::vector<TrainingExample> make_examples(const Dataset& data, const CaptionModel& model) {
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    for (const auto& caption : data.records[i].captions) {
      out.push_back({&data.scenes[i], align_targets(eval::tokenize(caption), model.vocab(),
                                                     data.scenes[i].ocr_surfaces, model.config().prefer_copy,
                                                     model.config().max_len)});
    }
  }
  return out;
}

void Adam::step(num::ParamStore& store, double lr) {
  auto& params = store.all();
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.rows(), p.value.cols());
      v_.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  if (m_.size() != params.size()) throw ArgumentError("Adam: parameter set changed between steps");
  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].value.data();
    auto g = params[i].grad.data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      w[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + options_.eps);
    }
  }
}

Trainer::Trainer(CaptionModel& model) : model_(model) {}

double Trainer::current_lr() const {
  const auto& c = model_.config();
  if (c.lr_decay_step != 0 && step_ >= c.lr_decay_step) return c.lr * c.lr_decay_factor;
  return c.lr;
}

namespace {

struct BatchLoss {
  num::Var loss;
  std::size_t correct = 0;
  std::size_t total = 0;
};

BatchLoss batch_loss(num::Tape& tape, const CaptionModel& model, std::span<const TrainingExample> batch) {
  if (batch.empty()) throw ArgumentError("train_step: empty batch");
  BatchLoss out;
  std::vector<num::Var> losses;
  for (const auto& ex : batch) {
    if (ex.scene == nullptr) throw ArgumentError("train_step: example without a scene");
    auto r = model.teacher_forced_loss(tape, *ex.scene, ex.targets);
    losses.push_back(r.loss);
    out.correct += r.correct;
    out.total += r.total;
  }
  num::Var total = losses.size() == 1 ? losses.front() : num::sum(num::concat_rows(losses));
  out.loss = num::scale(total, 1.0 / static_cast<double>(losses.size()));
  return out;
}

}  // namespace

StepResult Trainer::train_step(std::span<const TrainingExample> batch) {
  num::Tape tape;
  BatchLoss b = batch_loss(tape, model_, batch);
  StepResult result{b.loss.value()(0, 0), b.correct, b.total, current_lr()};
  if (!std::isfinite(result.loss)) throw EvaluationError("train_step: loss is not finite");
  model_.params().zero_grad();
  tape.backward(b.loss);
  adam_.step(model_.params(), result.lr);
  ++step_;
  return result;
}

StepResult Trainer::evaluate(std::span<const TrainingExample> batch) const {
  num::Tape tape;
  BatchLoss b = batch_loss(tape, model_, batch);
  return {b.loss.value()(0, 0), b.correct, b.total, current_lr()};
}

StepResult train(CaptionModel& model, const std::vector<TrainingExample>& examples, std::size_t steps,
                 const StepCallback& on_step) {
  if (examples.empty()) throw ArgumentError("train: no training examples");
  Trainer trainer(model);
  const std::size_t n = examples.size();
  const std::size_t b = std::min(model.config().batch_size, n);
  std::vector<TrainingExample> batch;
  StepResult last;
  for (std::size_t s = 0; s < steps; ++s) {
    batch.clear();
    for (std::size_t i = 0; i < b; ++i) batch.push_back(examples[(s * b + i) % n]);
    last = trainer.train_step(batch);
    if (on_step && !on_step(s, last)) break;
  }
  return last;
}

}  // namespace depthcap::cap
