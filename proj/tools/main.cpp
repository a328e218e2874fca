// claimcheck: staged claim-verification pipeline. Subcommands mirror the
// pipeline stages (synth/kfold/retrieve/train/predict/evaluate/ablate) so
// every intermediate artifact is an inspectable file.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "claimcheck/config.hpp"
#include "claimcheck/corpus.hpp"
#include "claimcheck/errors.hpp"
#include "claimcheck/models.hpp"
#include "claimcheck/pipeline.hpp"
#include "claimcheck/scoring.hpp"
#include "claimcheck/synth.hpp"

namespace cc = claimcheck;

namespace {

// Thrown for bad invocations discovered after CLI11 parsing (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_writable(const std::string& path, bool force) {
  if (path.empty()) throw UsageError("output path is empty");
  if (!force && std::filesystem::exists(path))
    throw UsageError("refusing to overwrite " + path + " (pass --force)");
}

void note(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

template <typename T>
void override_if(const CLI::Option* opt, T& dst, const T& value) {
  if (opt != nullptr && opt->count() > 0) dst = value;
}

// Flag values for one subcommand, with the option handles needed to tell
// "explicitly passed" (overrides the config file) from "default".
struct Flags {
  std::string config_path;
  std::string corpus, claims, embeddings, lexicon, pools, checkpoint, predictions, out;
  std::string out_dir = ".", loss_csv, kind = "learnable";
  std::string variant = "v1", map_mode = "augment", oov = "zero", recall = "strict_group";
  std::vector<int> k_values, m_values;
  int K = 5, M = 5, dim = 50, hidden = 100, epochs = 50, jobs = 1, folds = 5;
  double lr = 0.01, decay = 1e-6, momentum = 0.9, l2 = 0.1, dropout = 0.5, tau = 0.5,
         lambda = 1.0;
  std::uint64_t seed = 13;
  bool force = false, random_pool = false, utility_filter = false, stratify = false,
       recall_explicit = false;

  CLI::Option *o_corpus = nullptr, *o_claims = nullptr, *o_embeddings = nullptr,
              *o_lexicon = nullptr, *o_variant = nullptr, *o_map_mode = nullptr,
              *o_oov = nullptr, *o_recall = nullptr, *o_K = nullptr, *o_M = nullptr,
              *o_dim = nullptr, *o_hidden = nullptr, *o_epochs = nullptr,
              *o_jobs = nullptr, *o_lr = nullptr, *o_decay = nullptr,
              *o_momentum = nullptr, *o_l2 = nullptr, *o_dropout = nullptr,
              *o_tau = nullptr, *o_lambda = nullptr, *o_seed = nullptr,
              *o_random_pool = nullptr, *o_utility_filter = nullptr;
};

void add_config_flag(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
}

void add_input_flags(CLI::App* cmd, Flags& f, bool corpus, bool claims, bool embeddings) {
  if (corpus) f.o_corpus = cmd->add_option("--corpus", f.corpus, "corpus JSONL");
  if (claims) f.o_claims = cmd->add_option("--claims", f.claims, "claims JSONL");
  if (embeddings) {
    f.o_embeddings = cmd->add_option("--embeddings", f.embeddings, "word vectors (text)");
    f.o_dim = cmd->add_option("--dim", f.dim, "embedding dimension");
  }
}

void add_model_flags(CLI::App* cmd, Flags& f) {
  f.o_variant =
      cmd->add_option("--variant", f.variant, "model variant: v1, v2, mt, mt-gumbel");
  f.o_hidden = cmd->add_option("--hidden", f.hidden, "hidden layer width");
  f.o_oov = cmd->add_option("--oov", f.oov, "out-of-vocabulary policy: zero or skip");
}

void add_train_flags(CLI::App* cmd, Flags& f) {
  f.o_lr = cmd->add_option("--lr", f.lr, "learning rate");
  f.o_decay = cmd->add_option("--decay", f.decay, "per-step learning-rate decay");
  f.o_momentum = cmd->add_option("--momentum", f.momentum, "momentum coefficient");
  f.o_l2 = cmd->add_option("--l2", f.l2, "L2 penalty on weights");
  f.o_dropout = cmd->add_option("--dropout", f.dropout, "dropout rate (plain verifier)");
  f.o_epochs = cmd->add_option("--epochs", f.epochs, "training epochs");
  f.o_tau = cmd->add_option("--tau", f.tau, "Gumbel-Softmax temperature");
  f.o_lambda = cmd->add_option("--lambda", f.lambda, "utility loss weight");
  f.o_seed = cmd->add_option("--seed", f.seed, "RNG seed");
}

void add_retrieval_flags(CLI::App* cmd, Flags& f) {
  f.o_K = cmd->add_option("--K", f.K, "frame-matched sentences per pool");
  f.o_M = cmd->add_option("--M", f.M, "scope sentences per pool");
  f.o_map_mode =
      cmd->add_option("--map-mode", f.map_mode, "out-of-scope mapping: none, augment, replace");
  f.o_random_pool =
      cmd->add_flag("--random-pool", f.random_pool, "sample pools instead of top-K/top-M");
  f.o_lexicon = cmd->add_option("--lexicon", f.lexicon, "frame lexicon JSON (claim fallback)");
}

cc::RunConfig resolve(const Flags& f) {
  cc::RunConfig config;
  if (!f.config_path.empty()) {
    cc::require_files({f.config_path});
    config = cc::load_run_config(f.config_path);
  }
  override_if(f.o_corpus, config.corpus_path, f.corpus);
  override_if(f.o_claims, config.claims_path, f.claims);
  override_if(f.o_embeddings, config.embeddings_path, f.embeddings);
  override_if(f.o_lexicon, config.lexicon_path, f.lexicon);
  // Bad values for enum-valued flags are usage errors, not data errors.
  try {
    if (f.o_variant && f.o_variant->count()) config.variant = cc::parse_variant(f.variant);
    if (f.o_oov && f.o_oov->count()) config.oov = cc::parse_oov(f.oov);
    if (f.o_map_mode && f.o_map_mode->count()) config.map_mode = cc::parse_map_mode(f.map_mode);
    if ((f.o_recall && f.o_recall->count()) || f.recall_explicit)
      config.recall_mode = cc::parse_recall_mode(f.recall);
  } catch (const cc::ParseError& e) {
    throw UsageError(e.what());
  }
  override_if(f.o_dim, config.embedding_dim, f.dim);
  override_if(f.o_hidden, config.hidden_dim, f.hidden);
  override_if(f.o_lr, config.train.learning_rate, f.lr);
  override_if(f.o_decay, config.train.decay, f.decay);
  override_if(f.o_momentum, config.train.momentum, f.momentum);
  override_if(f.o_l2, config.train.l2, f.l2);
  override_if(f.o_dropout, config.train.dropout, f.dropout);
  override_if(f.o_epochs, config.train.epochs, f.epochs);
  override_if(f.o_tau, config.train.tau, f.tau);
  override_if(f.o_lambda, config.train.lambda_utility, f.lambda);
  override_if(f.o_seed, config.train.seed, f.seed);
  override_if(f.o_K, config.train.K, f.K);
  override_if(f.o_M, config.train.M, f.M);
  override_if(f.o_random_pool, config.random_pool, f.random_pool);
  override_if(f.o_utility_filter, config.utility_filter, f.utility_filter);
  override_if(f.o_jobs, config.jobs, f.jobs);
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw cc::IoError("cannot write " + path);
  out << text;
  if (!out) throw cc::IoError("failed writing " + path);
}

// ---- subcommands ----------------------------------------------------------

void cmd_synth(const Flags& f) {
  if (f.kind != "learnable" && f.kind != "ablation")
    throw UsageError("--kind must be learnable or ablation");
  std::filesystem::create_directories(f.out_dir);
  for (const char* name : {"corpus.jsonl", "claims.jsonl", "embeddings.txt"})
    ensure_writable(f.out_dir + "/" + name, f.force);
  cc::SynthData data =
      f.kind == "learnable" ? cc::make_learnable(f.seed) : cc::make_ablation(f.seed);
  cc::write_synth(data, f.out_dir);
  note("synth: wrote %zu docs, %zu claims to %s", data.corpus.size(), data.claims.size(),
       f.out_dir.c_str());
}

void cmd_kfold(const Flags& f) {
  cc::RunConfig config = resolve(f);
  cc::require_files({config.claims_path});
  std::filesystem::create_directories(f.out_dir);
  const auto claims = cc::load_claims(config.claims_path);
  std::vector<cc::FoldSplit> folds;
  try {
    folds = cc::kfold_split(claims, f.folds, config.train.seed, f.stratify);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const std::string train_path =
        f.out_dir + "/fold" + std::to_string(i) + "_train.jsonl";
    const std::string test_path = f.out_dir + "/fold" + std::to_string(i) + "_test.jsonl";
    ensure_writable(train_path, f.force);
    ensure_writable(test_path, f.force);
    std::vector<cc::AnnotatedClaim> train, test;
    for (std::size_t idx : folds[i].train) train.push_back(claims[idx]);
    for (std::size_t idx : folds[i].test) test.push_back(claims[idx]);
    cc::save_claims(train_path, train);
    cc::save_claims(test_path, test);
    note("kfold: fold %zu -> %zu train / %zu test", i, train.size(), test.size());
  }
}

void cmd_retrieve(const Flags& f) {
  cc::RunConfig config = resolve(f);
  cc::require_files({config.corpus_path, config.claims_path, config.lexicon_path});
  ensure_writable(f.out, f.force);
  const cc::Corpus corpus = cc::load_corpus(config.corpus_path);
  auto claims = cc::load_claims(config.claims_path);
  note("retrieve: %zu docs, %zu claims", corpus.size(), claims.size());
  const cc::Gazetteer gazetteer = cc::build_gazetteer(corpus);
  cc::FrameLexicon lexicon;
  const bool have_lexicon = !config.lexicon_path.empty();
  if (have_lexicon) lexicon = cc::load_lexicon(config.lexicon_path);
  cc::annotate_claims(claims, gazetteer, have_lexicon ? &lexicon : nullptr);
  cc::RetrievalRun run =
      cc::retrieve_all(claims, corpus, gazetteer, config.retrieval_options(), config.jobs);
  cc::save_pools(f.out, run.pools);
  const cc::IrStats stats = cc::ir_stats(run.pools);
  note("retrieve: avg %.4f docs and %.4f frame sentences matched per claim",
       run.avg_docs_retrieved, run.avg_frame_sentences);
  note("retrieve: pools carry avg %.4f docs and %.4f sentences (K=%d, M=%d)",
       stats.avg_docs, stats.avg_sentences, config.train.K, config.train.M);
  note("retrieve: wrote %s", f.out.c_str());
}

void cmd_train(const Flags& f) {
  cc::RunConfig config = resolve(f);
  cc::require_files({config.corpus_path, config.claims_path, config.embeddings_path, f.pools});
  ensure_writable(f.out, f.force);
  if (!f.loss_csv.empty()) ensure_writable(f.loss_csv, f.force);
  const cc::Corpus corpus = cc::load_corpus(config.corpus_path);
  const auto claims = cc::load_claims(config.claims_path);
  auto pools = cc::load_pools(f.pools, corpus);
  const cc::EmbeddingTable table =
      cc::load_embeddings(config.embeddings_path, config.embedding_dim);
  if (table.skipped_lines() > 0)
    note("train: skipped %zu malformed embedding lines", table.skipped_lines());
  const auto examples = cc::join_examples(claims, pools);
  note("train: %zu examples, variant %s, hidden %d, %d epochs", examples.size(),
       cc::to_string(config.variant).c_str(), config.hidden_dim, config.train.epochs);
  cc::TrainResult result =
      cc::train(examples, table, config.train, config.variant, config.hidden_dim,
                [&](int epoch, const cc::LossParts& mean) {
                  note("train: epoch %d/%d loss %.6f (claim %.6f, utility %.6f)", epoch + 1,
                       config.train.epochs, mean.total, mean.claim, mean.utility);
                });
  cc::save_checkpoint(f.out, result.params, config.train);
  note("train: wrote %s", f.out.c_str());
  if (!f.loss_csv.empty()) {
    std::string csv = "epoch,claim_loss,utility_loss\n";
    char buf[96];
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e,
                    result.claim_loss_history[e], result.utility_loss_history[e]);
      csv += buf;
    }
    write_text(f.loss_csv, csv);
    note("train: wrote %s", f.loss_csv.c_str());
  }
}

void cmd_predict(const Flags& f) {
  cc::RunConfig config = resolve(f);
  cc::require_files(
      {config.corpus_path, config.claims_path, config.embeddings_path, f.pools, f.checkpoint});
  ensure_writable(f.out, f.force);
  const cc::Corpus corpus = cc::load_corpus(config.corpus_path);
  const auto claims = cc::load_claims(config.claims_path);
  const auto pools = cc::load_pools(f.pools, corpus);
  auto [params, train_config] = cc::load_checkpoint(f.checkpoint);
  const cc::EmbeddingTable table =
      cc::load_embeddings(config.embeddings_path, params.embed_dim);
  cc::PredictOptions options;
  options.mode = config.utility_filter ? cc::PredictMode::UtilityFiltered
                                       : cc::PredictMode::Raw;
  options.tau = train_config.tau;
  options.oov = config.oov;
  if (options.mode == cc::PredictMode::UtilityFiltered && !params.is_multitask())
    throw UsageError("--utility-filter needs an mt or mt-gumbel checkpoint");
  const auto preds = cc::predict_all(params, claims, pools, table, options, config.jobs);
  cc::save_predictions(f.out, preds);
  note("predict: wrote %zu predictions to %s", preds.size(), f.out.c_str());
}

void cmd_evaluate(const Flags& f) {
  cc::RunConfig config = resolve(f);
  cc::require_files({config.claims_path, f.predictions});
  if (!f.out.empty()) ensure_writable(f.out, f.force);
  const auto golds = cc::load_claims(config.claims_path);
  const auto preds = cc::load_predictions(f.predictions);
  const cc::ScoreReport report = cc::aggregate(preds, golds, config.recall_mode);
  std::fputs(cc::format_report(report).c_str(), stdout);
  if (!f.out.empty()) {
    cc::save_report(f.out, report);
    note("evaluate: wrote %s", f.out.c_str());
  }
}

void cmd_ablate(const Flags& f) {
  cc::RunConfig config = resolve(f);
  cc::require_files({config.corpus_path, config.claims_path, config.embeddings_path,
                     config.lexicon_path});
  ensure_writable(f.out, f.force);
  if (f.k_values.empty() || f.m_values.empty())
    throw UsageError("--k-values and --m-values must be non-empty");
  const cc::Corpus corpus = cc::load_corpus(config.corpus_path);
  auto claims = cc::load_claims(config.claims_path);
  const cc::Gazetteer gazetteer = cc::build_gazetteer(corpus);
  cc::FrameLexicon lexicon;
  const bool have_lexicon = !config.lexicon_path.empty();
  if (have_lexicon) lexicon = cc::load_lexicon(config.lexicon_path);
  cc::annotate_claims(claims, gazetteer, have_lexicon ? &lexicon : nullptr);
  const cc::EmbeddingTable table =
      cc::load_embeddings(config.embeddings_path, config.embedding_dim);

  cc::AblationOptions options;
  options.retrieval = config.retrieval_options();
  options.train = config.train;
  options.variant = config.variant;
  options.hidden_dim = config.hidden_dim;
  options.recall_mode = config.recall_mode;
  options.predict_mode = config.utility_filter ? cc::PredictMode::UtilityFiltered
                                               : cc::PredictMode::Raw;
  options.oov = config.oov;
  options.jobs = config.jobs;
  note("ablate: %zu x %zu grid over %zu claims", f.k_values.size(), f.m_values.size(),
       claims.size());
  const auto cells =
      cc::run_ablation(claims, corpus, table, f.k_values, f.m_values, options);
  write_text(f.out, cc::ablation_csv(cells));
  note("ablate: wrote %s", f.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"claim verification pipeline: retrieval, verifier training, scoring"};
  app.require_subcommand(1);

  // One Flags instance per subcommand; callbacks keep theirs alive.
  std::vector<std::shared_ptr<Flags>> all_flags;
  auto fresh = [&] {
    all_flags.push_back(std::make_shared<Flags>());
    return all_flags.back().get();
  };

  {
    auto* cmd = app.add_subcommand("synth", "generate a synthetic benchmark corpus");
    Flags* f = fresh();
    cmd->add_option("--out", f->out_dir, "output directory")->required();
    cmd->add_option("--kind", f->kind, "learnable or ablation");
    cmd->add_option("--seed", f->seed, "generator seed");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_synth(*f); });
  }
  {
    auto* cmd = app.add_subcommand("kfold", "split claims into cross-validation folds");
    Flags* f = fresh();
    add_config_flag(cmd, *f);
    add_input_flags(cmd, *f, false, true, false);
    cmd->add_option("--k", f->folds, "number of folds")->required();
    cmd->add_option("--out", f->out_dir, "output directory")->required();
    cmd->add_flag("--stratify", f->stratify, "stratify folds by gold label");
    f->o_seed = cmd->add_option("--seed", f->seed, "shuffle seed");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_kfold(*f); });
  }
  {
    auto* cmd = app.add_subcommand("retrieve", "build evidence pools for claims");
    Flags* f = fresh();
    add_config_flag(cmd, *f);
    add_input_flags(cmd, *f, true, true, false);
    add_retrieval_flags(cmd, *f);
    f->o_seed = cmd->add_option("--seed", f->seed, "sampling seed (with --random-pool)");
    cmd->add_option("--out", f->out, "output pools JSONL")->required();
    f->o_jobs = cmd->add_option("--jobs", f->jobs, "worker threads");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_retrieve(*f); });
  }
  {
    auto* cmd = app.add_subcommand("train", "train a verifier on retrieved pools");
    Flags* f = fresh();
    add_config_flag(cmd, *f);
    add_input_flags(cmd, *f, true, true, true);
    cmd->add_option("--pools", f->pools, "evidence pools JSONL")->required();
    add_model_flags(cmd, *f);
    add_train_flags(cmd, *f);
    f->o_K = cmd->add_option("--K", f->K, "pool frame arity (recorded in checkpoint)");
    f->o_M = cmd->add_option("--M", f->M, "pool scope arity (recorded in checkpoint)");
    cmd->add_option("--out", f->out, "output checkpoint JSON")->required();
    cmd->add_option("--loss-csv", f->loss_csv, "per-epoch loss CSV");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_train(*f); });
  }
  {
    auto* cmd = app.add_subcommand("predict", "label claims with a trained checkpoint");
    Flags* f = fresh();
    add_config_flag(cmd, *f);
    add_input_flags(cmd, *f, true, true, true);
    cmd->add_option("--pools", f->pools, "evidence pools JSONL")->required();
    cmd->add_option("--checkpoint", f->checkpoint, "trained checkpoint")->required();
    f->o_utility_filter = cmd->add_flag("--utility-filter", f->utility_filter,
                                        "keep only evidence with P(useful) > 0.5");
    f->o_oov = cmd->add_option("--oov", f->oov, "out-of-vocabulary policy: zero or skip");
    cmd->add_option("--out", f->out, "output predictions JSONL")->required();
    f->o_jobs = cmd->add_option("--jobs", f->jobs, "worker threads");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_predict(*f); });
  }
  {
    auto* cmd = app.add_subcommand("evaluate", "score predictions against gold claims");
    Flags* f = fresh();
    add_config_flag(cmd, *f);
    add_input_flags(cmd, *f, false, true, false);
    cmd->add_option("--predictions", f->predictions, "predictions JSONL")->required();
    f->o_recall = cmd->add_option("--recall-mode", f->recall,
                                  "evidence recall: strict_group or per_sentence");
    cmd->add_flag_callback(
        "--strict-recall",
        [f] {
          f->recall = "strict_group";
          f->recall_explicit = true;
        },
        "shorthand for --recall-mode strict_group");
    cmd->add_flag_callback(
        "--sentence-recall",
        [f] {
          f->recall = "per_sentence";
          f->recall_explicit = true;
        },
        "shorthand for --recall-mode per_sentence");
    cmd->add_option("--out", f->out, "report JSON path");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_evaluate(*f); });
  }
  {
    auto* cmd = app.add_subcommand("ablate", "K/M grid sweep: retrieve+train+evaluate");
    Flags* f = fresh();
    add_config_flag(cmd, *f);
    add_input_flags(cmd, *f, true, true, true);
    add_model_flags(cmd, *f);
    add_train_flags(cmd, *f);
    f->o_map_mode = cmd->add_option("--map-mode", f->map_mode,
                                    "out-of-scope mapping: none, augment, replace");
    f->o_lexicon = cmd->add_option("--lexicon", f->lexicon, "frame lexicon JSON");
    cmd->add_option("--k-values", f->k_values, "K grid, e.g. 1,2,3")
        ->required()
        ->delimiter(',');
    cmd->add_option("--m-values", f->m_values, "M grid, e.g. 0,5")
        ->required()
        ->delimiter(',');
    cmd->add_option("--out", f->out, "output grid CSV")->required();
    f->o_jobs = cmd->add_option("--jobs", f->jobs, "worker threads");
    cmd->add_flag("--force", f->force, "overwrite existing outputs");
    cmd->callback([f] { cmd_ablate(*f); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    note("error: %s", e.what());
    return 1;
  } catch (const cc::IoError& e) {
    note("error: %s", e.what());
    return 2;
  } catch (const cc::ParseError& e) {
    note("error: %s", e.what());
    return 2;
  } catch (const cc::ValidationError& e) {
    note("error: %s", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    note("error: %s", e.what());
    return 1;
  } catch (const std::exception& e) {
    note("error: %s", e.what());
    return 2;
  }
  return 0;
}
