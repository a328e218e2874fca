#include "claimcheck/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "claimcheck/errors.hpp"

namespace claimcheck {

using ordered_json = nlohmann::ordered_json;

std::string to_string(RecallMode m) {
  return m == RecallMode::StrictGroup ? "strict_group" : "per_sentence";
}

std::pair<bool, bool> score_claim(const Prediction& pred, Label gold_label,
                                  const std::vector<EvidenceGroup>& gold_groups) {
  const bool label_correct = pred.label == gold_label;
  if (gold_label == Label::Unsure) return {label_correct, label_correct};
  if (!label_correct) return {false, false};
  const std::set<SentenceRef> predicted(pred.selected_evidence.begin(),
                                        pred.selected_evidence.end());
  for (const auto& group : gold_groups) {
    if (std::includes(predicted.begin(), predicted.end(), group.begin(), group.end()))
      return {true, true};
  }
  return {true, false};
}

namespace {

struct ClaimEvidence {
  double precision = 0.0;
  double recall = 0.0;
};

ClaimEvidence claim_evidence(const Prediction* pred, const AnnotatedClaim& gold,
                             RecallMode mode) {
  std::set<SentenceRef> predicted;
  if (pred != nullptr)
    predicted.insert(pred->selected_evidence.begin(), pred->selected_evidence.end());
  std::set<SentenceRef> gold_union;
  for (const auto& group : gold.gold_evidence) gold_union.insert(group.begin(), group.end());

  ClaimEvidence out;
  if (!predicted.empty()) {
    std::size_t hit = 0;
    for (const auto& ref : predicted) hit += gold_union.count(ref);
    out.precision = static_cast<double>(hit) / static_cast<double>(predicted.size());
  }
  if (mode == RecallMode::StrictGroup) {
    for (const auto& group : gold.gold_evidence) {
      if (std::includes(predicted.begin(), predicted.end(), group.begin(), group.end())) {
        out.recall = 1.0;
        break;
      }
    }
  } else if (!gold_union.empty()) {
    std::size_t hit = 0;
    for (const auto& ref : gold_union) hit += predicted.count(ref);
    out.recall = static_cast<double>(hit) / static_cast<double>(gold_union.size());
  }
  return out;
}

std::unordered_map<std::string, const Prediction*> index_predictions(
    const std::vector<Prediction>& preds) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.claim_id, &p).second)
      throw ValidationError("duplicate prediction for claim '" + p.claim_id + "'");
  }
  return by_id;
}

EvidencePrf finish_prf(double psum, double rsum, std::size_t n) {
  EvidencePrf out;
  if (n == 0) return out;
  out.precision = psum / static_cast<double>(n);
  out.recall = rsum / static_cast<double>(n);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

}  // namespace

EvidencePrf evidence_prf(const std::vector<Prediction>& preds,
                         const std::vector<AnnotatedClaim>& golds, RecallMode mode) {
  auto by_id = index_predictions(preds);
  double psum = 0.0, rsum = 0.0;
  std::size_t n = 0;
  for (const auto& gold : golds) {
    if (!gold.gold_label || *gold.gold_label == Label::Unsure) continue;
    auto it = by_id.find(gold.claim_id);
    ClaimEvidence ce = claim_evidence(it == by_id.end() ? nullptr : it->second, gold, mode);
    psum += ce.precision;
    rsum += ce.recall;
    ++n;
  }
  return finish_prf(psum, rsum, n);
}

ScoreReport aggregate(const std::vector<Prediction>& preds,
                      const std::vector<AnnotatedClaim>& golds, RecallMode mode) {
  auto by_id = index_predictions(preds);
  ScoreReport report;
  report.recall_mode = mode;
  report.n_claims = golds.size();

  std::size_t label_hits = 0, fever_hits = 0;
  double psum = 0.0, rsum = 0.0;
  for (const auto& gold : golds) {
    if (!gold.gold_label)
      throw ValidationError("claim '" + gold.claim_id + "' has no gold label to score against");
    auto it = by_id.find(gold.claim_id);
    const Prediction* pred = it == by_id.end() ? nullptr : it->second;
    if (pred == nullptr) {
      ++report.missing_predictions;
    } else {
      auto [label_ok, fever_ok] = score_claim(*pred, *gold.gold_label, gold.gold_evidence);
      label_hits += label_ok;
      fever_hits += fever_ok;
      report.confusion[label_index(*gold.gold_label)][label_index(pred->label)]++;
    }
    if (*gold.gold_label != Label::Unsure) {
      ClaimEvidence ce = claim_evidence(pred, gold, mode);
      psum += ce.precision;
      rsum += ce.recall;
      ++report.n_evidence_claims;
    }
  }
  if (!golds.empty()) {
    report.label_accuracy = static_cast<double>(label_hits) / static_cast<double>(golds.size());
    report.fever_score = static_cast<double>(fever_hits) / static_cast<double>(golds.size());
  }
  EvidencePrf prf = finish_prf(psum, rsum, report.n_evidence_claims);
  report.evidence_precision = prf.precision;
  report.evidence_recall = prf.recall;
  report.evidence_f1 = prf.f1;
  return report;
}

std::string report_to_json(const ScoreReport& report) {
  ordered_json doc;
  doc["fever_score"] = report.fever_score;
  doc["label_accuracy"] = report.label_accuracy;
  doc["evidence_precision"] = report.evidence_precision;
  doc["evidence_recall"] = report.evidence_recall;
  doc["evidence_f1"] = report.evidence_f1;
  doc["recall_mode"] = to_string(report.recall_mode);
  doc["averaging"] = "micro_over_claims";
  doc["n_claims"] = report.n_claims;
  doc["n_evidence_claims"] = report.n_evidence_claims;
  doc["missing_predictions"] = report.missing_predictions;
  ordered_json confusion = ordered_json::object();
  for (int g = 0; g < 3; ++g) {
    ordered_json row = ordered_json::object();
    for (int p = 0; p < 3; ++p)
      row[to_string(static_cast<Label>(p))] = report.confusion[g][p];
    confusion[to_string(static_cast<Label>(g))] = std::move(row);
  }
  doc["confusion"] = std::move(confusion);
  return doc.dump(2);
}

std::string format_report(const ScoreReport& report) {
  char buf[256];
  std::string out;
  auto line = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%-20s %.4f\n", name, v);
    out += buf;
  };
  line("fever_score", report.fever_score);
  line("label_accuracy", report.label_accuracy);
  line("evidence_precision", report.evidence_precision);
  line("evidence_recall", report.evidence_recall);
  line("evidence_f1", report.evidence_f1);
  std::snprintf(buf, sizeof buf, "%-20s %zu (evidence-scored %zu, missing predictions %zu)\n",
                "claims", report.n_claims, report.n_evidence_claims,
                report.missing_predictions);
  out += buf;
  out += "confusion (rows gold, cols predicted):\n";
  std::snprintf(buf, sizeof buf, "%12s %10s %10s %10s\n", "", "SUPPORTED", "REFUTED", "UNSURE");
  out += buf;
  for (int g = 0; g < 3; ++g) {
    std::snprintf(buf, sizeof buf, "%12s %10zu %10zu %10zu\n",
                  to_string(static_cast<Label>(g)).c_str(), report.confusion[g][0],
                  report.confusion[g][1], report.confusion[g][2]);
    out += buf;
  }
  return out;
}

void save_report(const std::string& path, const ScoreReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out << report_to_json(report) << '\n';
  if (!out) throw IoError("failed writing report: " + path);
}

}  // namespace claimcheck
