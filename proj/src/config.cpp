#include "claimcheck/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "claimcheck/errors.hpp"

namespace claimcheck {

using json = nlohmann::json;

RetrievalOptions RunConfig::retrieval_options() const {
  RetrievalOptions opts;
  opts.K = train.K;
  opts.M = train.M;
  opts.map_mode = map_mode;
  opts.sampling.random = random_pool;
  opts.sampling.seed = train.seed;
  return opts;
}

PredictOptions RunConfig::predict_options() const {
  PredictOptions opts;
  opts.mode = utility_filter ? PredictMode::UtilityFiltered : PredictMode::Raw;
  opts.tau = train.tau;
  opts.oov = oov;
  return opts;
}

void RunConfig::validate() const {
  train.validate();
  if (embedding_dim < 1) throw std::invalid_argument("config: embedding_dim must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("config: hidden_dim must be >= 1");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  // utility_filter is checked against the loaded checkpoint at predict time;
  // the configured variant only matters for training.
}

std::string to_string(OovPolicy p) { return p == OovPolicy::Zero ? "zero" : "skip"; }

OovPolicy parse_oov(const std::string& s) {
  if (s == "zero") return OovPolicy::Zero;
  if (s == "skip") return OovPolicy::Skip;
  throw ParseError("unknown oov policy: '" + s + "' (expected zero or skip)");
}

RecallMode parse_recall_mode(const std::string& s) {
  if (s == "strict_group" || s == "strict") return RecallMode::StrictGroup;
  if (s == "per_sentence" || s == "sentence") return RecallMode::PerSentence;
  throw ParseError("unknown recall mode: '" + s +
                   "' (expected strict_group or per_sentence)");
}

namespace {

template <typename T, typename Fn>
void maybe(const json& j, const char* key, T& out, const Fn& convert) {
  if (j.contains(key)) out = convert(j.at(key));
}

void maybe_str(const json& j, const char* key, std::string& out) {
  maybe(j, key, out, [](const json& v) { return v.get<std::string>(); });
}

void maybe_int(const json& j, const char* key, int& out) {
  maybe(j, key, out, [](const json& v) { return v.get<int>(); });
}

void maybe_bool(const json& j, const char* key, bool& out) {
  maybe(j, key, out, [](const json& v) { return v.get<bool>(); });
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("config " + path + ": expected a JSON object");

  RunConfig config;
  try {
    if (doc.contains("paths")) {
      const json& p = doc["paths"];
      maybe_str(p, "corpus", config.corpus_path);
      maybe_str(p, "claims", config.claims_path);
      maybe_str(p, "embeddings", config.embeddings_path);
      maybe_str(p, "lexicon", config.lexicon_path);
      maybe_str(p, "output_dir", config.output_dir);
    }
    if (doc.contains("model")) {
      const json& m = doc["model"];
      maybe(m, "variant", config.variant,
            [](const json& v) { return parse_variant(v.get<std::string>()); });
      maybe_int(m, "embedding_dim", config.embedding_dim);
      maybe_int(m, "hidden_dim", config.hidden_dim);
      maybe(m, "oov", config.oov,
            [](const json& v) { return parse_oov(v.get<std::string>()); });
    }
    if (doc.contains("train")) config.train = TrainConfig::from_json(doc["train"]);
    if (doc.contains("retrieval")) {
      const json& r = doc["retrieval"];
      maybe_int(r, "K", config.train.K);
      maybe_int(r, "M", config.train.M);
      maybe(r, "map_mode", config.map_mode,
            [](const json& v) { return parse_map_mode(v.get<std::string>()); });
      maybe_bool(r, "random_pool", config.random_pool);
    }
    if (doc.contains("scoring")) {
      const json& s = doc["scoring"];
      maybe_bool(s, "utility_filter", config.utility_filter);
      maybe(s, "recall_mode", config.recall_mode,
            [](const json& v) { return parse_recall_mode(v.get<std::string>()); });
    }
    maybe_int(doc, "jobs", config.jobs);
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return config;
}

void require_files(const std::vector<std::string>& paths) {
  std::string missing;
  for (const auto& p : paths) {
    if (p.empty()) continue;
    if (!std::filesystem::exists(p)) {
      if (!missing.empty()) missing += ", ";
      missing += p;
    }
  }
  if (!missing.empty()) throw IoError("missing input file(s): " + missing);
}

}  // namespace claimcheck
