#pragma once

#include <string>

#include "claimcheck/embed.hpp"
#include "claimcheck/models.hpp"
#include "claimcheck/neural.hpp"
#include "claimcheck/pipeline.hpp"
#include "claimcheck/scoring.hpp"

namespace claimcheck {

/// Everything a pipeline run needs, loadable from one JSON document with
/// sections {paths, model, train, retrieval, scoring}. Command-line flags
/// override file values field by field.
struct RunConfig {
  // paths
  std::string corpus_path;
  std::string claims_path;
  std::string embeddings_path;
  std::string lexicon_path;  // optional
  std::string output_dir = ".";

  // model
  Variant variant = Variant::V1;
  int embedding_dim = 50;
  int hidden_dim = 100;
  OovPolicy oov = OovPolicy::Zero;

  TrainConfig train;

  // retrieval
  MapMode map_mode = MapMode::Augment;
  bool random_pool = false;

  // scoring / prediction
  bool utility_filter = false;
  RecallMode recall_mode = RecallMode::StrictGroup;

  int jobs = 1;

  RetrievalOptions retrieval_options() const;
  PredictOptions predict_options() const;

  void validate() const;  // value ranges; not path existence
};

std::string to_string(OovPolicy p);
OovPolicy parse_oov(const std::string& s);
RecallMode parse_recall_mode(const std::string& s);

RunConfig load_run_config(const std::string& path);

/// Existence check for the given input paths ("" entries are skipped);
/// throws IoError naming every missing file at once.
void require_files(const std::vector<std::string>& paths);

}  // namespace claimcheck
