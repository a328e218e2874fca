#include "claimcheck/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "claimcheck/errors.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/rng.hpp"

namespace claimcheck {

using nlohmann::json;
using nlohmann::ordered_json;

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard(const std::vector<std::string>& tokens_a,
               const std::vector<std::string>& tokens_b) {
  return jaccard(std::set<std::string>(tokens_a.begin(), tokens_a.end()),
                 std::set<std::string>(tokens_b.begin(), tokens_b.end()));
}

std::vector<std::string> retrieve_documents(const AnnotatedClaim& claim,
                                            const Gazetteer& gazetteer) {
  std::set<std::string> hits;
  for (const auto& entity : claim.entities) {
    auto it = gazetteer.canonical_by_norm.find(normalize_title(entity));
    if (it != gazetteer.canonical_by_norm.end())
      hits.insert(it->second.begin(), it->second.end());
  }
  return {hits.begin(), hits.end()};  // set iteration is already lexicographic
}

std::vector<std::string> retrieve_documents(const AnnotatedClaim& claim,
                                            const Corpus& corpus) {
  return retrieve_documents(claim, build_gazetteer(corpus));
}

namespace {

// descending similarity, then (doc_id, index)
bool candidate_order(const EvidenceCandidate& a, const EvidenceCandidate& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
  return a.sentence_index < b.sentence_index;
}

}  // namespace

std::vector<EvidenceCandidate> retrieve_sentences(
    const AnnotatedClaim& claim, const Corpus& corpus,
    const std::vector<std::string>& doc_ids) {
  std::vector<EvidenceCandidate> out;
  if (claim.frames.empty()) return out;
  for (const auto& id : doc_ids) {
    const AnnotatedDocument* doc = corpus.find(id);
    if (!doc) continue;
    for (const auto& sent : doc->sentences) {
      const double sim = jaccard(sent.frames, claim.frames);
      if (sim <= 0.0) continue;
      EvidenceCandidate c;
      c.doc_id = sent.doc_id;
      c.sentence_index = sent.index;
      c.tokens = sent.tokens;
      c.frames = sent.frames;
      c.in_scope = sent.in_scope;
      c.similarity = sim;
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(), candidate_order);
  return out;
}

std::vector<std::pair<int, int>> hungarian_assign(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (n < 1 || m < 1)
    throw std::invalid_argument("hungarian_assign: empty cost matrix");
  if (!cost.allFinite())
    throw std::invalid_argument("hungarian_assign: non-finite cost entry");

  // Square up with constant-cost padding: dummy rows/columns contribute the
  // same total whatever they match, so the real assignment stays optimal.
  const int s = std::max(n, m);
  const double pad = cost.cwiseAbs().maxCoeff() + 1.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(s, s, pad);
  a.topLeftCorner(n, m) = cost;

  // Potentials + shortest augmenting path, O(s^3). p[j] is the row matched
  // to column j; indices are 1-based with 0 as the virtual start column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0);
  std::vector<int> p(s + 1, 0), way(s + 1, 0);
  for (int i = 1; i <= s; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(s + 1, inf);
    std::vector<char> used(s + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= s; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j <= s; ++j) {
    const int row = p[j] - 1;
    const int col = j - 1;
    if (row < n && col < m) pairs.emplace_back(row, col);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<ScopeMapping> map_out_of_scope(
    const std::vector<EvidenceCandidate>& frame_sents,
    const std::vector<AnnotatedSentence>& scope_sents) {
  std::vector<ScopeMapping> out;
  if (frame_sents.empty() || scope_sents.empty()) return out;

  Eigen::MatrixXd cost(frame_sents.size(), scope_sents.size());
  for (std::size_t i = 0; i < frame_sents.size(); ++i)
    for (std::size_t j = 0; j < scope_sents.size(); ++j)
      cost(static_cast<int>(i), static_cast<int>(j)) =
          1.0 - jaccard(frame_sents[i].tokens, scope_sents[j].tokens);

  for (const auto& [row, col] : hungarian_assign(cost)) {
    ScopeMapping m;
    m.frame_sentence = frame_sents[static_cast<std::size_t>(row)];
    m.scope_sentence = scope_sents[static_cast<std::size_t>(col)];
    m.similarity = 1.0 - cost(row, col);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

EvidenceCandidate make_pad(bool with_target) {
  EvidenceCandidate pad;
  pad.doc_id.clear();
  pad.sentence_index = -1;
  pad.similarity = 0.0;
  pad.in_scope = false;
  if (with_target) pad.utility_target = 0;
  return pad;
}

std::vector<EvidenceCandidate> select_top(std::vector<EvidenceCandidate> cands,
                                          int quota, const PoolSampling& sampling,
                                          Rng& rng) {
  std::sort(cands.begin(), cands.end(), candidate_order);
  if (quota >= static_cast<int>(cands.size())) return cands;
  if (!sampling.random) {
    cands.resize(static_cast<std::size_t>(quota));
    return cands;
  }
  // uniform sample without replacement, then restore similarity order
  std::vector<std::size_t> idx(cands.size());
  std::iota(idx.begin(), idx.end(), 0u);
  rng.shuffle(idx);
  idx.resize(static_cast<std::size_t>(quota));
  std::sort(idx.begin(), idx.end());
  std::vector<EvidenceCandidate> picked;
  picked.reserve(idx.size());
  for (std::size_t i : idx) picked.push_back(std::move(cands[i]));
  return picked;
}

}  // namespace

EvidencePool build_pool(const AnnotatedClaim& claim,
                        std::vector<EvidenceCandidate> frame_sents,
                        std::vector<EvidenceCandidate> scope_sents, int K,
                        int M, const PoolSampling& sampling) {
  if (K < 0 || M < 0) throw std::invalid_argument("build_pool: negative K or M");
  if (K + M < 1) throw std::invalid_argument("build_pool: K+M must be at least 1");

  Rng rng(Rng::derive(sampling.seed, claim.claim_id));
  EvidencePool pool;
  pool.claim_id = claim.claim_id;
  pool.K = K;
  pool.M = M;

  auto frame_picks = select_top(std::move(frame_sents), K, sampling, rng);
  auto scope_picks = select_top(std::move(scope_sents), M, sampling, rng);
  pool.candidates.reserve(static_cast<std::size_t>(K + M));
  for (auto& c : frame_picks) pool.candidates.push_back(std::move(c));
  for (auto& c : scope_picks) pool.candidates.push_back(std::move(c));

  const bool training = claim.gold_label.has_value();
  while (pool.candidates.size() < static_cast<std::size_t>(K + M))
    pool.candidates.push_back(make_pad(training));

  assign_utility_targets(pool, claim);
  return pool;
}

void assign_utility_targets(EvidencePool& pool, const AnnotatedClaim& claim) {
  if (!claim.gold_label) {
    for (auto& c : pool.candidates) c.utility_target.reset();
    return;
  }
  std::set<SentenceRef> gold;
  for (const auto& group : claim.gold_evidence) gold.insert(group.begin(), group.end());
  for (auto& c : pool.candidates)
    c.utility_target = (!c.is_pad() && gold.count(c.ref())) ? 1 : 0;
}

IrStats ir_stats(const std::vector<EvidencePool>& pools) {
  if (pools.empty()) throw std::invalid_argument("ir_stats: no pools");
  double doc_sum = 0.0, sent_sum = 0.0;
  for (const auto& pool : pools) {
    std::set<std::string> docs;
    std::size_t sents = 0;
    for (const auto& c : pool.candidates) {
      if (c.is_pad()) continue;
      docs.insert(c.doc_id);
      ++sents;
    }
    doc_sum += static_cast<double>(docs.size());
    sent_sum += static_cast<double>(sents);
  }
  const double n = static_cast<double>(pools.size());
  return IrStats{doc_sum / n, sent_sum / n};
}

void save_pools(const std::string& path, const std::vector<EvidencePool>& pools) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& pool : pools) {
    ordered_json j;
    j["claim_id"] = pool.claim_id;
    j["K"] = pool.K;
    j["M"] = pool.M;
    ordered_json evidence = ordered_json::array();
    for (const auto& c : pool.candidates) {
      if (c.is_pad()) continue;
      ordered_json cj;
      cj["doc_id"] = c.doc_id;
      cj["sentence_index"] = c.sentence_index;
      cj["similarity"] = c.similarity;
      cj["in_scope"] = c.in_scope;
      evidence.push_back(std::move(cj));
    }
    j["evidence"] = std::move(evidence);
    out << j.dump() << "\n";
  }
}

std::vector<EvidencePool> load_pools(const std::string& path, const Corpus& corpus) {
  std::vector<EvidencePool> pools;
  for_each_jsonl(path, [&](std::size_t line_no, const json& j) {
    EvidencePool pool;
    pool.claim_id = j.at("claim_id").get<std::string>();
    pool.K = j.at("K").get<int>();
    pool.M = j.at("M").get<int>();
    for (const auto& cj : j.at("evidence")) {
      EvidenceCandidate c;
      c.doc_id = cj.at("doc_id").get<std::string>();
      c.sentence_index = cj.at("sentence_index").get<int>();
      c.similarity = cj.at("similarity").get<double>();
      c.in_scope = cj.at("in_scope").get<bool>();
      const AnnotatedSentence* sent = corpus.find_sentence(c.ref());
      if (!sent)
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": evidence (" + c.doc_id + ", " +
                              std::to_string(c.sentence_index) +
                              ") not found in corpus");
      c.tokens = sent->tokens;
      c.frames = sent->frames;
      pool.candidates.push_back(std::move(c));
    }
    if (static_cast<int>(pool.candidates.size()) > pool.K + pool.M)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": pool larger than K+M");
    while (pool.candidates.size() < static_cast<std::size_t>(pool.K + pool.M))
      pool.candidates.push_back(make_pad(false));
    pools.push_back(std::move(pool));
  });
  return pools;
}

}  // namespace claimcheck
