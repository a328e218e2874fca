#pragma once

#include <string>
#include <vector>

#include "claimcheck/annotate.hpp"
#include "claimcheck/corpus.hpp"
#include "claimcheck/embed.hpp"
#include "claimcheck/models.hpp"
#include "claimcheck/retrieval.hpp"
#include "claimcheck/scoring.hpp"

namespace claimcheck {

/// What to do with frame-matched sentences that fall outside the document
/// scope: leave them alone (None), add their best-matching in-scope
/// counterparts to the scope channel (Augment), or rewrite them to those
/// counterparts outright (Replace). Matching is a Hungarian assignment under
/// 1 - token-Jaccard cost.
enum class MapMode { None, Augment, Replace };

std::string to_string(MapMode m);
MapMode parse_map_mode(const std::string& s);

struct RetrievalOptions {
  int K = 5;
  int M = 5;
  MapMode map_mode = MapMode::Augment;
  PoolSampling sampling;
};

/// Fills in missing claim annotations: empty entity sets are populated from
/// the gazetteer over the claim tokens; empty frame sets from the lexicon
/// when one is supplied.
void annotate_claims(std::vector<AnnotatedClaim>& claims, const Gazetteer& gazetteer,
                     const FrameLexicon* lexicon = nullptr);

/// One claim through document retrieval, frame-sentence matching, scope
/// scoring, and pool assembly.
EvidencePool retrieve_for_claim(const AnnotatedClaim& claim, const Corpus& corpus,
                                const Gazetteer& gazetteer,
                                const RetrievalOptions& options);

struct RetrievalRun {
  std::vector<EvidencePool> pools;      // one per claim, in claim order
  double avg_docs_retrieved = 0.0;      // documents matched per claim
  double avg_frame_sentences = 0.0;     // frame-matched sentences per claim
};

/// Retrieval over all claims; `jobs` > 1 uses a worker pool but output order
/// and content stay deterministic.
RetrievalRun retrieve_all(const std::vector<AnnotatedClaim>& claims,
                          const Corpus& corpus, const Gazetteer& gazetteer,
                          const RetrievalOptions& options, int jobs = 1);

/// Pairs each claim with its pool (by claim_id) and derives utility targets
/// from the gold evidence. Claims lacking a pool are a validation error that
/// lists the missing claim_ids; pools without a claim are ignored, so pools
/// built over a superset (e.g. before a fold split) are fine.
std::vector<TrainExample> join_examples(const std::vector<AnnotatedClaim>& claims,
                                        std::vector<EvidencePool>& pools);

/// Evaluation-mode predictions for each claim, in claim order. Missing pools
/// are a validation error as in join_examples.
std::vector<Prediction> predict_all(const VerifierParams& params,
                                    const std::vector<AnnotatedClaim>& claims,
                                    const std::vector<EvidencePool>& pools,
                                    const EmbeddingTable& table,
                                    const PredictOptions& options, int jobs = 1);

struct AblationCell {
  int K = 0;
  int M = 0;
  double label_accuracy = 0.0;
  double fever_score = 0.0;
  double evidence_precision = 0.0;
  double evidence_recall = 0.0;
  double evidence_f1 = 0.0;
};

struct AblationOptions {
  RetrievalOptions retrieval;  // K/M overridden per cell
  TrainConfig train;
  Variant variant = Variant::V1;
  int hidden_dim = 32;
  RecallMode recall_mode = RecallMode::StrictGroup;
  PredictMode predict_mode = PredictMode::Raw;
  OovPolicy oov = OovPolicy::Zero;
  int jobs = 1;
};

/// Full retrieve/train/predict/evaluate cycle per (K, M) cell, scored on the
/// training claims. Grid axes must be non-empty.
std::vector<AblationCell> run_ablation(const std::vector<AnnotatedClaim>& claims,
                                       const Corpus& corpus,
                                       const EmbeddingTable& table,
                                       const std::vector<int>& k_values,
                                       const std::vector<int>& m_values,
                                       const AblationOptions& options);

std::string ablation_csv(const std::vector<AblationCell>& cells);

}  // namespace claimcheck
