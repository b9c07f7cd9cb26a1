#include <benchmark/benchmark.h>

#include "depthcap/captioner/model.hpp"
#include "depthcap/captioner/synthetic.hpp"
#include "depthcap/captioner/trainer.hpp"
#include "depthcap/defum/defum.hpp"
#include "depthcap/numerics/kernels.hpp"
#include "depthcap/numerics/params.hpp"

using namespace depthcap;
using num::Matrix;

namespace {

Matrix random_matrix(num::SplitMix64& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (auto& x : m.data()) x = rng.uniform(-1.0, 1.0);
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  num::SplitMix64 rng(1);
  const Matrix a = random_matrix(rng, n, n), b = random_matrix(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(num::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_SoftmaxRows(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  num::SplitMix64 rng(2);
  const Matrix a = random_matrix(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(num::softmax_rows(a));
}
BENCHMARK(BM_SoftmaxRows)->Arg(64)->Arg(512);

void BM_DefumForward(benchmark::State& state) {
  const auto entities = static_cast<std::size_t>(state.range(0));
  num::SplitMix64 rng(3);
  num::ParamStore store(3);
  const defum::Defum module(store, {64, 2, 2, 1, 4});
  const Matrix x = random_matrix(rng, entities, 64);
  Matrix r(entities, entities);
  for (std::size_t i = 0; i < entities; ++i) {
    for (std::size_t j = 0; j < entities; ++j) r(i, j) = 0.01 * (double(j) - double(i));
  }
  for (auto _ : state) {
    num::Tape t;
    benchmark::DoNotOptimize(module.update(t.constant(x), t.constant(r)).value());
  }
}
BENCHMARK(BM_DefumForward)->Arg(16)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  cap::ModelConfig config = cap::desk_config();
  config.appearance_dim = 8;
  cap::CaptionModel model(config, cap::synthetic_vocabulary(64));
  std::vector<cap::SyntheticScene> scenes;
  for (std::uint64_t s = 0; s < 8; ++s) scenes.push_back(cap::random_scene(s, {}));
  std::vector<cap::TrainingExample> batch;
  for (const auto& s : scenes) {
    batch.push_back({&s.scene, {{cap::TokenSource::Vocab, 5}, {cap::TokenSource::Ocr, 0}, {cap::TokenSource::Vocab, 9},
                                {cap::TokenSource::Vocab, 6}, {cap::TokenSource::Vocab, 2}}});
  }
  cap::Trainer trainer(model);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.train_step(batch).loss);
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  cap::ModelConfig config = cap::desk_config();
  config.appearance_dim = 8;
  const cap::CaptionModel model(config, cap::synthetic_vocabulary(64));
  const auto scene = cap::random_scene(1, {});
  for (auto _ : state) benchmark::DoNotOptimize(model.generate(scene.scene));
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
