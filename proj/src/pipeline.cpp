#include "claimcheck/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "claimcheck/errors.hpp"

namespace claimcheck {

std::string to_string(MapMode m) {
  switch (m) {
    case MapMode::None: return "none";
    case MapMode::Augment: return "augment";
    case MapMode::Replace: return "replace";
  }
  throw std::logic_error("unknown map mode");
}

MapMode parse_map_mode(const std::string& s) {
  if (s == "none") return MapMode::None;
  if (s == "augment") return MapMode::Augment;
  if (s == "replace") return MapMode::Replace;
  throw ParseError("unknown map mode: '" + s + "' (expected none, augment, or replace)");
}

void annotate_claims(std::vector<AnnotatedClaim>& claims, const Gazetteer& gazetteer,
                     const FrameLexicon* lexicon) {
  for (auto& claim : claims) {
    if (claim.entities.empty())
      claim.entities = annotate_entities(claim.tokens, gazetteer);
    if (claim.frames.empty() && lexicon != nullptr)
      claim.frames = annotate_frames(claim.tokens, *lexicon);
  }
}

namespace {

struct ClaimRetrieval {
  EvidencePool pool;
  std::size_t n_docs = 0;
  std::size_t n_frame_sentences = 0;
};

// Worker-pool map over [0, n): each worker claims the next index; results
// land by index, so the output is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, const Fn& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

ClaimRetrieval retrieve_one(const AnnotatedClaim& claim, const Corpus& corpus,
                            const Gazetteer& gazetteer, const RetrievalOptions& options) {
  ClaimRetrieval out;
  const std::vector<std::string> doc_ids = retrieve_documents(claim, gazetteer);
  out.n_docs = doc_ids.size();
  std::vector<EvidenceCandidate> frame_cands = retrieve_sentences(claim, corpus, doc_ids);
  out.n_frame_sentences = frame_cands.size();

  // In-scope sentences of the retrieved documents that are not already frame
  // candidates; they serve both as the scope channel and as mapping targets.
  std::set<SentenceRef> frame_refs;
  for (const auto& c : frame_cands) frame_refs.insert(c.ref());
  std::vector<const AnnotatedSentence*> scope_sentences;
  for (const auto& doc_id : doc_ids) {
    const AnnotatedDocument* doc = corpus.find(doc_id);
    for (const auto& sent : doc->sentences)
      if (sent.in_scope && !frame_refs.count(SentenceRef{sent.doc_id, sent.index}))
        scope_sentences.push_back(&sent);
  }

  std::map<SentenceRef, EvidenceCandidate> scope_cands;
  for (const AnnotatedSentence* sent : scope_sentences) {
    EvidenceCandidate c;
    c.doc_id = sent->doc_id;
    c.sentence_index = sent->index;
    c.tokens = sent->tokens;
    c.frames = sent->frames;
    c.in_scope = true;
    c.similarity = jaccard(claim.tokens, sent->tokens);
    scope_cands.emplace(c.ref(), std::move(c));
  }

  if (options.map_mode != MapMode::None && !scope_sentences.empty()) {
    std::vector<EvidenceCandidate> out_of_scope;
    for (const auto& c : frame_cands)
      if (!c.in_scope) out_of_scope.push_back(c);
    std::vector<AnnotatedSentence> targets;
    targets.reserve(scope_sentences.size());
    for (const AnnotatedSentence* s : scope_sentences) targets.push_back(*s);
    const std::vector<ScopeMapping> mappings = map_out_of_scope(out_of_scope, targets);

    if (options.map_mode == MapMode::Augment) {
      // Promote each mapping target in the scope channel.
      for (const auto& m : mappings) {
        SentenceRef ref{m.scope_sentence.doc_id, m.scope_sentence.index};
        auto it = scope_cands.find(ref);
        if (it != scope_cands.end())
          it->second.similarity = std::max(it->second.similarity, m.similarity);
      }
    } else {
      // Rewrite each mapped frame candidate to its in-scope counterpart,
      // keeping the frame-match score that earned it the slot.
      std::map<SentenceRef, const AnnotatedSentence*> rewrite;
      for (const auto& m : mappings)
        rewrite[m.frame_sentence.ref()] = &m.scope_sentence;
      std::map<SentenceRef, EvidenceCandidate> rewritten;
      for (auto& c : frame_cands) {
        auto it = rewrite.find(c.ref());
        if (it != rewrite.end()) {
          const AnnotatedSentence* target = it->second;
          c.doc_id = target->doc_id;
          c.sentence_index = target->index;
          c.tokens = target->tokens;
          c.frames = target->frames;
          c.in_scope = true;
          scope_cands.erase(SentenceRef{target->doc_id, target->index});  // moved channels
        }
        auto [slot, inserted] = rewritten.emplace(c.ref(), c);
        if (!inserted && c.similarity > slot->second.similarity) slot->second = c;
      }
      frame_cands.clear();
      for (auto& [ref, cand] : rewritten) frame_cands.push_back(std::move(cand));
    }
  }

  std::vector<EvidenceCandidate> scope_list;
  scope_list.reserve(scope_cands.size());
  for (auto& [ref, cand] : scope_cands) scope_list.push_back(std::move(cand));
  out.pool = build_pool(claim, std::move(frame_cands), std::move(scope_list),
                        options.K, options.M, options.sampling);
  return out;
}

}  // namespace

EvidencePool retrieve_for_claim(const AnnotatedClaim& claim, const Corpus& corpus,
                                const Gazetteer& gazetteer,
                                const RetrievalOptions& options) {
  return retrieve_one(claim, corpus, gazetteer, options).pool;
}

RetrievalRun retrieve_all(const std::vector<AnnotatedClaim>& claims, const Corpus& corpus,
                          const Gazetteer& gazetteer, const RetrievalOptions& options,
                          int jobs) {
  RetrievalRun run;
  std::vector<ClaimRetrieval> results(claims.size());
  parallel_for(claims.size(), jobs, [&](std::size_t i) {
    results[i] = retrieve_one(claims[i], corpus, gazetteer, options);
  });
  run.pools.reserve(results.size());
  double docs = 0.0, sents = 0.0;
  for (auto& r : results) {
    docs += static_cast<double>(r.n_docs);
    sents += static_cast<double>(r.n_frame_sentences);
    run.pools.push_back(std::move(r.pool));
  }
  if (!claims.empty()) {
    run.avg_docs_retrieved = docs / static_cast<double>(claims.size());
    run.avg_frame_sentences = sents / static_cast<double>(claims.size());
  }
  return run;
}

namespace {

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t cap = 10;
  for (std::size_t i = 0; i < ids.size() && i < cap; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > cap) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

std::unordered_map<std::string, std::size_t> index_pools(
    const std::vector<EvidencePool>& pools) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    if (!by_id.emplace(pools[i].claim_id, i).second)
      throw ValidationError("duplicate pool for claim '" + pools[i].claim_id + "'");
  }
  return by_id;
}

}  // namespace

std::vector<TrainExample> join_examples(const std::vector<AnnotatedClaim>& claims,
                                        std::vector<EvidencePool>& pools) {
  auto by_id = index_pools(pools);
  std::vector<TrainExample> examples;
  std::vector<std::string> missing;
  examples.reserve(claims.size());
  for (const auto& claim : claims) {
    auto it = by_id.find(claim.claim_id);
    if (it == by_id.end()) {
      missing.push_back(claim.claim_id);
      continue;
    }
    EvidencePool& pool = pools[it->second];
    assign_utility_targets(pool, claim);
    examples.push_back({&claim, &pool});
  }
  if (!missing.empty())
    throw ValidationError("no evidence pool for claim_ids: " + list_ids(missing));
  return examples;
}

std::vector<Prediction> predict_all(const VerifierParams& params,
                                    const std::vector<AnnotatedClaim>& claims,
                                    const std::vector<EvidencePool>& pools,
                                    const EmbeddingTable& table,
                                    const PredictOptions& options, int jobs) {
  auto by_id = index_pools(pools);
  std::vector<const EvidencePool*> ordered;
  std::vector<std::string> missing;
  ordered.reserve(claims.size());
  for (const auto& claim : claims) {
    auto it = by_id.find(claim.claim_id);
    if (it == by_id.end()) {
      missing.push_back(claim.claim_id);
      continue;
    }
    ordered.push_back(&pools[it->second]);
  }
  if (!missing.empty())
    throw ValidationError("no evidence pool for claim_ids: " + list_ids(missing));

  std::vector<Prediction> preds(claims.size());
  parallel_for(claims.size(), jobs, [&](std::size_t i) {
    preds[i] = predict(params, claims[i], *ordered[i], table, options);
  });
  return preds;
}

std::vector<AblationCell> run_ablation(const std::vector<AnnotatedClaim>& claims,
                                       const Corpus& corpus, const EmbeddingTable& table,
                                       const std::vector<int>& k_values,
                                       const std::vector<int>& m_values,
                                       const AblationOptions& options) {
  if (k_values.empty() || m_values.empty())
    throw std::invalid_argument("ablation: K and M grids must be non-empty");
  const Gazetteer gazetteer = build_gazetteer(corpus);
  std::vector<AblationCell> cells;
  for (int k : k_values) {
    for (int m : m_values) {
      RetrievalOptions ropts = options.retrieval;
      ropts.K = k;
      ropts.M = m;
      TrainConfig tconf = options.train;
      tconf.K = k;
      tconf.M = m;
      RetrievalRun run = retrieve_all(claims, corpus, gazetteer, ropts, options.jobs);
      std::vector<TrainExample> examples = join_examples(claims, run.pools);
      TrainResult trained = train(examples, table, tconf, options.variant, options.hidden_dim);
      PredictOptions popts;
      popts.mode = options.predict_mode;
      popts.tau = tconf.tau;
      popts.oov = options.oov;
      std::vector<Prediction> preds =
          predict_all(trained.params, claims, run.pools, table, popts, options.jobs);
      ScoreReport report = aggregate(preds, claims, options.recall_mode);
      cells.push_back({k, m, report.label_accuracy, report.fever_score,
                       report.evidence_precision, report.evidence_recall,
                       report.evidence_f1});
    }
  }
  return cells;
}

std::string ablation_csv(const std::vector<AblationCell>& cells) {
  std::string out =
      "K,M,label_accuracy,fever_score,evidence_precision,evidence_recall,evidence_f1\n";
  char buf[160];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", c.K, c.M,
                  c.label_accuracy, c.fever_score, c.evidence_precision,
                  c.evidence_recall, c.evidence_f1);
    out += buf;
  }
  return out;
}

}  // namespace claimcheck
