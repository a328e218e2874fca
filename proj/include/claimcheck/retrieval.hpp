#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "claimcheck/annotate.hpp"
#include "claimcheck/corpus.hpp"

namespace claimcheck {

/// One retrieved sentence, scored against the claim. Pad entries (doc_id
/// empty) fill a pool up to its fixed arity and embed to the zero vector.
struct EvidenceCandidate {
  std::string doc_id;
  int sentence_index = -1;
  std::vector<std::string> tokens;
  std::set<std::string> frames;
  bool in_scope = false;
  double similarity = 0.0;                // Jaccard or cosine, in [0,1]
  std::optional<int> utility_target;      // {0,1}, set for training claims

  bool is_pad() const { return doc_id.empty(); }
  SentenceRef ref() const { return SentenceRef{doc_id, sentence_index}; }
};

/// Fixed-arity evidence pool for one claim: up to K frame-matched sentences
/// plus up to M scope sentences, padded to exactly K+M entries.
struct EvidencePool {
  std::string claim_id;
  std::vector<EvidenceCandidate> candidates;
  int K = 0;
  int M = 0;
};

/// Token-set (or frame-set) Jaccard similarity; 0 when both sets are empty.
double jaccard(const std::vector<std::string>& tokens_a,
               const std::vector<std::string>& tokens_b);
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// Doc ids whose normalized title exactly matches a claim entity,
/// deduplicated, in lexicographic order.
std::vector<std::string> retrieve_documents(const AnnotatedClaim& claim,
                                            const Gazetteer& gazetteer);
std::vector<std::string> retrieve_documents(const AnnotatedClaim& claim,
                                            const Corpus& corpus);

/// Every sentence of the given documents sharing at least one frame with the
/// claim, scored by frame-set Jaccard, sorted by descending similarity with
/// (doc_id, index) tie-breaks.
std::vector<EvidenceCandidate> retrieve_sentences(
    const AnnotatedClaim& claim, const Corpus& corpus,
    const std::vector<std::string>& doc_ids);

/// Minimum-cost assignment of min(n,m) (row, column) pairs. Rectangular
/// inputs are squared up internally by constant-cost padding. Non-finite
/// entries throw std::invalid_argument. Pairs come back sorted by row.
std::vector<std::pair<int, int>> hungarian_assign(const Eigen::MatrixXd& cost);

/// Hungarian matching of frame sentences onto scope sentences under
/// cost = 1 - jaccard(tokens); each returned pair carries its Jaccard
/// similarity. Either list empty yields an empty mapping.
struct ScopeMapping {
  EvidenceCandidate frame_sentence;
  AnnotatedSentence scope_sentence;
  double similarity = 0.0;
};
std::vector<ScopeMapping> map_out_of_scope(
    const std::vector<EvidenceCandidate>& frame_sents,
    const std::vector<AnnotatedSentence>& scope_sents);

/// Selection mode for build_pool: deterministic top-K/top-M by default, or
/// seeded uniform sampling without replacement (stream derived per claim).
struct PoolSampling {
  bool random = false;
  std::uint64_t seed = 0;
};

/// Top-K frame candidates plus top-M scope candidates, padded to K+M.
/// For claims with a gold label, utility_target is 1 iff the candidate
/// appears in any gold evidence group.
EvidencePool build_pool(const AnnotatedClaim& claim,
                        std::vector<EvidenceCandidate> frame_sents,
                        std::vector<EvidenceCandidate> scope_sents, int K,
                        int M, const PoolSampling& sampling = {});

/// (Re)derives utility targets on every candidate from the claim's gold
/// evidence; clears them when the claim has no gold label.
void assign_utility_targets(EvidencePool& pool, const AnnotatedClaim& claim);

struct IrStats {
  double avg_docs = 0.0;
  double avg_sentences = 0.0;
};

/// Means over claims of distinct (non-pad) documents and sentences per pool.
IrStats ir_stats(const std::vector<EvidencePool>& pools);

/// Pool JSONL: {claim_id, K, M, evidence: [{doc_id, sentence_index,
/// similarity, in_scope}]}. Pad entries are not written; load re-pads and
/// rehydrates tokens and frames from the corpus.
void save_pools(const std::string& path, const std::vector<EvidencePool>& pools);
std::vector<EvidencePool> load_pools(const std::string& path, const Corpus& corpus);

}  // namespace claimcheck
