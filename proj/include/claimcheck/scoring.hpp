#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "claimcheck/corpus.hpp"
#include "claimcheck/models.hpp"

namespace claimcheck {

/// How evidence recall is credited per claim: StrictGroup requires the
/// predicted set to contain at least one complete gold group (the official
/// task rule); PerSentence scores coverage of the union of gold sentences.
enum class RecallMode { StrictGroup, PerSentence };

std::string to_string(RecallMode m);

struct ScoreReport {
  double fever_score = 0.0;
  double label_accuracy = 0.0;
  double evidence_precision = 0.0;
  double evidence_recall = 0.0;
  double evidence_f1 = 0.0;
  // confusion[gold][predicted], indexed by label_index(); predictions missing
  // for a gold claim are counted separately and score as incorrect.
  std::array<std::array<std::size_t, 3>, 3> confusion{};
  std::size_t n_claims = 0;
  std::size_t n_evidence_claims = 0;  // gold SUPPORTED/REFUTED, the evidence-scored subset
  std::size_t missing_predictions = 0;
  RecallMode recall_mode = RecallMode::StrictGroup;
};

/// (label_correct, fever_correct) for one claim. The evidence requirement is
/// waived when the gold label is UNSURE; otherwise the prediction must cover
/// some gold group completely.
std::pair<bool, bool> score_claim(const Prediction& pred, Label gold_label,
                                  const std::vector<EvidenceGroup>& gold_groups);

struct EvidencePrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Evidence metrics over the gold SUPPORTED/REFUTED claims, averaged
/// per-claim. Precision of an empty prediction is 0; f1 is 0 when p+r is 0.
/// Claims without a prediction score as empty predictions.
EvidencePrf evidence_prf(const std::vector<Prediction>& preds,
                         const std::vector<AnnotatedClaim>& golds,
                         RecallMode mode = RecallMode::StrictGroup);

/// Full report over a gold claim set. Gold claims must be labeled; duplicate
/// predictions for one claim_id are a validation error; predictions for
/// unknown claim_ids are ignored.
ScoreReport aggregate(const std::vector<Prediction>& preds,
                      const std::vector<AnnotatedClaim>& golds,
                      RecallMode mode = RecallMode::StrictGroup);

std::string report_to_json(const ScoreReport& report);
std::string format_report(const ScoreReport& report);  // human-readable table
void save_report(const std::string& path, const ScoreReport& report);

}  // namespace claimcheck
