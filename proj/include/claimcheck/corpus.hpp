#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace claimcheck {

enum class Label { Supported, Refuted, Unsure };

/// Canonical serialized form: SUPPORTED / REFUTED / UNSURE.
std::string to_string(Label label);

/// Accepts the canonical names plus the FEVER-style aliases
/// SUPPORTS / REFUTES / NOT ENOUGH INFO. Anything else throws ParseError.
Label parse_label(const std::string& s);

/// A (document, sentence) handle used for gold evidence and predictions.
struct SentenceRef {
  std::string doc_id;
  int index = 0;
  auto operator<=>(const SentenceRef&) const = default;
};

using EvidenceGroup = std::set<SentenceRef>;

struct AnnotatedSentence {
  std::string doc_id;
  int index = 0;
  std::string text;
  std::vector<std::string> tokens;
  std::set<std::string> frames;
  bool in_scope = false;
};

struct AnnotatedDocument {
  std::string doc_id;  // doubles as the page title used for entity matching
  std::vector<AnnotatedSentence> sentences;
};

struct AnnotatedClaim {
  std::string claim_id;
  std::string text;
  std::vector<std::string> tokens;
  std::set<std::string> frames;
  std::set<std::string> entities;
  std::optional<Label> gold_label;
  std::vector<EvidenceGroup> gold_evidence;  // alternative sufficient groups
};

/// Document collection, immutable after load. Iteration order is load order;
/// lookup is by doc_id.
struct Corpus {
  std::vector<AnnotatedDocument> docs;
  std::unordered_map<std::string, std::size_t> index;

  /// Validates and appends. Throws ValidationError on duplicate doc_id,
  /// non-contiguous sentence indices, or an empty doc_id.
  void add(AnnotatedDocument doc);

  const AnnotatedDocument* find(const std::string& doc_id) const;
  const AnnotatedSentence* find_sentence(const SentenceRef& ref) const;
  std::size_t size() const { return docs.size(); }
};

/// Fallback tokenizer for records that arrive without tokens: lowercases,
/// splits on Unicode whitespace, strips surrounding punctuation. Producers
/// are expected to tokenize their own data; this is only a safety net.
std::vector<std::string> tokenize(const std::string& text);

Corpus load_corpus(const std::string& path);
void save_corpus(const std::string& path, const Corpus& corpus);

std::vector<AnnotatedClaim> load_claims(const std::string& path);
void save_claims(const std::string& path, const std::vector<AnnotatedClaim>& claims);

/// One cross-validation fold, as indices into the claim vector.
struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Deterministic shuffled k-fold partition. Every claim lands in exactly one
/// test fold. With stratify=true the shuffle happens within gold-label strata
/// and folds are dealt round-robin so label ratios stay balanced.
std::vector<FoldSplit> kfold_split(const std::vector<AnnotatedClaim>& claims,
                                   int k, std::uint64_t seed,
                                   bool stratify = false);

}  // namespace claimcheck
