#include "depthcap/captioner/grad_suite.hpp"

#include "depthcap/captioner/model.hpp"
#include "depthcap/captioner/synthetic.hpp"
#include "depthcap/defum/defum.hpp"
#include "depthcap/features/embed.hpp"
#include "depthcap/numerics/ops.hpp"
#include "depthcap/sgam/sgam.hpp"

namespace depthcap::cap {

namespace {

num::Matrix random_weights(num::SplitMix64& rng, std::size_t rows, std::size_t cols) {
  num::Matrix m(rows, cols);
  for (auto& x : m.data()) x = rng.uniform(-1.0, 1.0);
  return m;
}

std::vector<num::Parameter*> all_params(num::ParamStore& store) {
  std::vector<num::Parameter*> out;
  for (auto& p : store.all()) out.push_back(&p);
  return out;
}

}  // namespace

std::vector<GradSuiteResult> run_grad_suites(const ModelConfig& config, std::uint64_t seed,
                                             const num::GradCheckOptions& options) {
  validate(config);
  const std::size_t d = config.appearance_dim == 0 ? 8 : config.appearance_dim;
  SceneShape shape;
  shape.objects = 1;
  shape.ocr = 3;
  shape.concepts = config.K;
  shape.appearance_dim = d;
  const SyntheticScene synth = random_scene(num::derive_seed(seed, "scene"), shape);
  const PreparedScene& sc = synth.scene;
  num::SplitMix64 rng(num::derive_seed(seed, "weights"));
  std::vector<GradSuiteResult> results;

  {
    num::ParamStore store(num::derive_seed(seed, "features"));
    features::EntityEmbedder embedder(store, d, config.t);
    const num::Matrix w = random_weights(rng, sc.num_objects() + sc.num_ocr() + sc.num_concepts(), config.t);
    auto graph = [&](num::Tape& tape) {
      auto c = [&](const num::Matrix& m) { return tape.constant(m); };
      num::Var all = num::concat_rows(
          {embedder.embed_objects(c(sc.object_appearance), c(sc.object_spatial)),
           embedder.embed_ocr(c(sc.ocr_appearance), c(sc.ocr_subword), c(sc.ocr_phoc), c(sc.ocr_spatial),
                              c(sc.ocr_confidence)),
           embedder.embed_concepts(c(sc.concept_subword), c(sc.concept_score))});
      return num::weighted_sum(all, w);
    };
    results.push_back({"features", num::grad_check(graph, all_params(store), options)});
  }
  {
    num::ParamStore store(num::derive_seed(seed, "defum"));
    defum::Defum module(store, {d, config.defum_layers, config.defum_heads, config.depth_heads, 4});
    const num::Matrix visual = defum::concat_visual(sc.object_appearance, sc.ocr_appearance);
    const num::Matrix w = random_weights(rng, visual.rows(), d);
    auto graph = [&](num::Tape& tape) {
      return num::weighted_sum(module.update(tape.constant(visual), tape.constant(sc.relative_depth)), w);
    };
    results.push_back({"defum", num::grad_check(graph, all_params(store), options)});
  }
  {
    num::ParamStore store(num::derive_seed(seed, "sgam"));
    sgam::SemanticAlignment align(store, config.sgam_axis);
    const num::Matrix w = random_weights(rng, sc.num_ocr(), sc.ocr_subword.cols());
    auto graph = [&](num::Tape& tape) {
      return num::weighted_sum(align.align(tape.constant(sc.concept_subword), tape.constant(sc.ocr_subword)), w);
    };
    results.push_back({"sgam", num::grad_check(graph, all_params(store), options)});
  }
  {
    ModelConfig c = config;
    c.appearance_dim = d;
    c.zero_heads = false;
    c.max_len = std::max<std::size_t>(c.max_len, 4);
    CaptionModel model(c, synthetic_vocabulary(12));
    const std::vector<TokenRef> targets{{TokenSource::Vocab, 5},
                                        {TokenSource::Ocr, 1},
                                        {TokenSource::Vocab, 7},
                                        {TokenSource::Vocab, ingest::Vocabulary::kEos}};
    auto graph = [&](num::Tape& tape) { return model.teacher_forced_loss(tape, sc, targets).loss; };
    results.push_back({"captioner", num::grad_check(graph, all_params(model.params()), options)});
  }
  return results;
}

}  // namespace depthcap::cap
