#include "depthcap/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>

#include "depthcap/captioner/checkpoint.hpp"
#include "depthcap/captioner/grad_suite.hpp"
#include "depthcap/captioner/trainer.hpp"
#include "depthcap/errors.hpp"
#include "depthcap/eval/corpus_io.hpp"
#include "depthcap/eval/metrics.hpp"
#include "depthcap/features/phoc.hpp"
#include "depthcap/ingest/fixtures.hpp"

namespace depthcap::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

struct GenFixturesArgs {
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::string out;
};

int gen_fixtures(const GenFixturesArgs& a, std::ostream& out) {
  ingest::gen_fixtures(a.seed, a.n, ingest::FixtureConfig{}, a.out);
  cap::ModelConfig config = cap::desk_config();
  config.seed = a.seed;
  write_text(fs::path(a.out) / "config.json", cap::to_json(config) + "\n");
  out << "wrote " << a.n << " records to " << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string config;
  std::string out;
  std::optional<std::size_t> steps;
  std::size_t log_every = 50;
};

int train(const TrainArgs& a, std::ostream& out) {
  cap::ModelConfig config = cap::load_config(a.config);
  if (a.steps) config.steps = *a.steps;
  const cap::Dataset data = cap::load_dataset(a.data, config.K, config.allow_oov);
  if (data.records.empty()) throw ValidationError("no records in '" + a.data + "'");
  const std::size_t d = data.records.front().feature_dim();
  if (config.appearance_dim != 0 && config.appearance_dim != d) {
    throw ValidationError("config appearance_dim " + std::to_string(config.appearance_dim) +
                          " does not match the data (" + std::to_string(d) + ")");
  }
  config.appearance_dim = d;
  cap::validate(config);
  ingest::Vocabulary vocab = ingest::load_vocabulary(resolve(a.data, config.vocab_path));

  cap::CaptionModel model(config, std::move(vocab));
  const auto examples = cap::make_examples(data, model);
  out << std::fixed << std::setprecision(6);
  const auto last = cap::train(model, examples, config.steps, [&](std::size_t step, const cap::StepResult& r) {
    if (a.log_every != 0 && ((step + 1) % a.log_every == 0 || step + 1 == config.steps)) {
      out << "step " << step + 1 << " loss " << r.loss << " acc " << r.accuracy() << " lr " << r.lr << "\n";
    }
    return true;
  });
  (void)last;
  cap::save_checkpoint(a.out, model);
  out << "saved " << a.out << "\n";
  return kExitOk;
}

struct CaptionArgs {
  std::string ckpt;
  std::string data;
  std::string out;
};

int caption(const CaptionArgs& a, std::ostream& out) {
  const auto model = cap::load_checkpoint(a.ckpt);
  const auto& config = model->config();
  const cap::Dataset data = cap::load_dataset(a.data, config.K, config.allow_oov);
  std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + a.out + "'");
  for (const auto& scene : data.scenes) {
    const cap::CaptionHypothesis hyp = model->generate(scene);
    nlohmann::ordered_json j;
    j["id"] = scene.id;
    j["caption"] = hyp.text();
    auto sources = nlohmann::ordered_json::array();
    for (const auto& t : hyp.tokens) {
      sources.push_back({{"source", t.ref.source == cap::TokenSource::Vocab ? "vocab" : "ocr"},
                         {"index", t.ref.index}});
    }
    j["token_sources"] = std::move(sources);
    f << j.dump() << "\n";
  }
  if (!f) throw Error("write to '" + a.out + "' failed");
  out << "captioned " << data.scenes.size() << " records into " << a.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string refs;
  bool smooth = false;
  bool idf_from_refs_only = false;
};

int evaluate(const EvalArgs& a, std::ostream& out) {
  const eval::Corpus corpus =
      eval::build_corpus(eval::load_caption_jsonl(a.pred), eval::load_caption_jsonl(a.refs));
  const double bleu = eval::bleu4(corpus, {a.smooth});
  eval::CiderOptions cider_options;
  cider_options.idf_from_refs_only = a.idf_from_refs_only;
  const double cider = eval::cider_d(corpus, cider_options);
  out << std::fixed << std::setprecision(6) << "BLEU-4: " << bleu << "\nCIDEr-D: " << cider << "\n";
  return kExitOk;
}

struct GradcheckArgs {
  std::string config;
  std::size_t seeds = 1;
  std::size_t max_entries = 64;
  bool verbose = false;
};

int gradcheck(const GradcheckArgs& a, std::ostream& out) {
  const cap::ModelConfig config = cap::load_config(a.config);
  num::GradCheckOptions options;
  options.max_entries_per_param = a.max_entries;
  bool ok = true;
  out << std::scientific << std::setprecision(3);
  for (std::size_t s = 0; s < a.seeds; ++s) {
    for (const auto& r : cap::run_grad_suites(config, config.seed + s, options)) {
      out << r.name << " seed " << config.seed + s << " checked " << r.report.checked << " max_rel_err "
          << r.report.max_rel_error << (r.report.passed ? " ok" : " FAIL") << "\n";
      if (!r.report.passed || a.verbose) {
        out << "  worst " << r.report.worst.param << "[" << r.report.worst.index << "] analytic "
            << r.report.worst.analytic << " numeric " << r.report.worst.numeric << "\n";
      }
      ok = ok && r.report.passed;
    }
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-aware scene-text captioner", "depthcap"};
  app.require_subcommand(1);

  GenFixturesArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-fixtures", "Write a synthetic corpus");
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("--n", gen.n, "number of images")->required();
  gen_cmd->add_option("--out", gen.out)->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--data", tr.data)->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--config", tr.config)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out)->required();
  train_cmd->add_option("--steps", tr.steps, "override the configured step count");
  train_cmd->add_option("--log-every", tr.log_every, "progress interval in steps (0 = quiet)");

  CaptionArgs capa;
  auto* caption_cmd = app.add_subcommand("caption", "Greedy-decode a caption for every record");
  caption_cmd->add_option("--ckpt", capa.ckpt)->required()->check(CLI::ExistingFile);
  caption_cmd->add_option("--data", capa.data)->required()->check(CLI::ExistingDirectory);
  caption_cmd->add_option("--out", capa.out)->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against references");
  eval_cmd->add_option("--pred", ev.pred)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--refs", ev.refs)->required()->check(CLI::ExistingFile);
  eval_cmd->add_flag("--bleu-smooth", ev.smooth, "add-one smoothing for BLEU");
  eval_cmd->add_flag("--idf-from-refs-only", ev.idf_from_refs_only, "allow a single-image CIDEr-D corpus");

  GradcheckArgs gc;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference checks of every learned stage");
  grad_cmd->add_option("--config", gc.config)->required()->check(CLI::ExistingFile);
  grad_cmd->add_option("--seeds", gc.seeds)->check(CLI::PositiveNumber);
  grad_cmd->add_option("--max-entries", gc.max_entries, "entries sampled per parameter (0 = all)");
  grad_cmd->add_flag("--verbose", gc.verbose, "report the worst entry of every suite");

  auto* bigram_cmd = app.add_subcommand("dump-bigrams", "Print the PHOC bigram list");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return gen_fixtures(gen, out);
    if (*train_cmd) return train(tr, out);
    if (*caption_cmd) return caption(capa, out);
    if (*eval_cmd) return evaluate(ev, out);
    if (*grad_cmd) return gradcheck(gc, out);
    if (*bigram_cmd) {
      for (auto b : features::kPhocBigrams) out << b << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace depthcap::cli
