#include "claimcheck/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "claimcheck/errors.hpp"
#include "claimcheck/rng.hpp"

namespace claimcheck {

namespace {

constexpr int kDim = 16;

Eigen::VectorXd token_vector(const std::string& token, std::uint64_t seed) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kDim);
  // Signal tokens sit far out on dedicated axes; everything else is small
  // deterministic noise derived from the token itself, so vectors do not
  // depend on generation order.
  // The magnitude is tuned so the class signal still dominates after pool
  // averaging (one signal sentence among four) under heavy L2 and dropout.
  if (token == "affirmo") {
    v[0] = 24.0;
  } else if (token == "nego") {
    v[0] = -24.0;
  } else if (token == "vago") {
    v[1] = 24.0;
  } else {
    Rng rng(Rng::derive(seed, token));
    for (int i = 0; i < kDim; ++i) v[i] = rng.uniform(-0.2, 0.2);
  }
  return v;
}

void fill_table(SynthData& data, std::uint64_t seed) {
  std::set<std::string> vocab;
  for (const auto& doc : data.corpus.docs)
    for (const auto& sent : doc.sentences) vocab.insert(sent.tokens.begin(), sent.tokens.end());
  for (const auto& claim : data.claims) vocab.insert(claim.tokens.begin(), claim.tokens.end());
  data.table = EmbeddingTable(kDim);
  for (const auto& token : vocab) data.table.insert(token, token_vector(token, seed));
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

AnnotatedSentence make_sentence(int index, std::vector<std::string> tokens,
                                std::set<std::string> frames, bool in_scope) {
  AnnotatedSentence s;
  s.index = index;
  s.tokens = std::move(tokens);
  s.text = join(s.tokens);
  s.frames = std::move(frames);
  s.in_scope = in_scope;
  return s;
}

}  // namespace

SynthData make_learnable(std::uint64_t seed) {
  SynthData data;
  const int n_docs = 60;
  const int claims_per_doc = 5;
  for (int d = 0; d < n_docs; ++d) {
    const std::string subj = "subj" + std::to_string(d);
    const std::string ds = std::to_string(d);
    AnnotatedDocument doc;
    doc.doc_id = subj;
    std::set<std::string> all_frames;
    for (int j = 0; j < claims_per_doc; ++j)
      all_frames.insert("fr" + ds + "x" + std::to_string(j));
    for (int j = 0; j < claims_per_doc; ++j) {
      const int label_idx = (claims_per_doc * d + j) % 3;
      const char* signal = label_idx == 0 ? "affirmo" : label_idx == 1 ? "nego" : "vago";
      doc.sentences.push_back(make_sentence(j, {subj, signal},
                                            {"fr" + ds + "x" + std::to_string(j)}, false));
    }
    doc.sentences.push_back(make_sentence(5, {subj, "misc" + ds}, all_frames, false));
    doc.sentences.push_back(make_sentence(6, {subj, "scopea" + ds}, {}, true));
    doc.sentences.push_back(make_sentence(7, {subj, "scopeb" + ds}, {}, true));
    data.corpus.add(std::move(doc));

    for (int j = 0; j < claims_per_doc; ++j) {
      const int label_idx = (claims_per_doc * d + j) % 3;
      AnnotatedClaim claim;
      claim.claim_id = "claim_" + ds + "_" + std::to_string(j);
      claim.tokens = {subj, "prop" + std::to_string(j)};
      claim.text = join(claim.tokens);
      claim.frames = {"fr" + ds + "x" + std::to_string(j)};
      claim.entities = {subj};
      claim.gold_label = static_cast<Label>(label_idx);
      if (claim.gold_label != Label::Unsure)
        claim.gold_evidence.push_back({SentenceRef{subj, j}});
      data.claims.push_back(std::move(claim));
    }
  }
  fill_table(data, seed);
  return data;
}

SynthData make_ablation(std::uint64_t seed) {
  SynthData data;
  const int n_claims = 30;
  for (int i = 0; i < n_claims; ++i) {
    const std::string is = std::to_string(i);
    const std::string doc_id = "abl" + is;
    const std::string subj = "ablsubj" + is;
    const int group_size = 1 + i / 10;
    AnnotatedDocument doc;
    doc.doc_id = doc_id;
    for (int j = 0; j < 3; ++j)
      doc.sentences.push_back(make_sentence(j, {subj, "sent" + std::to_string(j)},
                                            {"fa" + is}, false));
    for (int j = 3; j < 6; ++j)
      doc.sentences.push_back(make_sentence(j, {subj, "sent" + std::to_string(j)},
                                            {"fa" + is, "fb" + is}, false));
    data.corpus.add(std::move(doc));

    AnnotatedClaim claim;
    claim.claim_id = "ablclaim" + is;
    claim.tokens = {subj, "stmt" + is};
    claim.text = join(claim.tokens);
    claim.frames = {"fa" + is};
    claim.entities = {doc_id};
    claim.gold_label = Label::Supported;
    EvidenceGroup group;
    for (int j = 0; j < group_size; ++j) group.insert(SentenceRef{doc_id, j});
    claim.gold_evidence.push_back(std::move(group));
    data.claims.push_back(std::move(claim));
  }
  fill_table(data, seed);
  return data;
}

void save_embeddings(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embeddings: " + path);
  std::vector<std::string> tokens;
  tokens.reserve(table.entries().size());
  for (const auto& [token, vec] : table.entries()) tokens.push_back(token);
  std::sort(tokens.begin(), tokens.end());
  char buf[64];
  for (const auto& token : tokens) {
    out << token;
    const Eigen::VectorXd& v = table.lookup(token);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %.17g", v[i]);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing embeddings: " + path);
}

void write_synth(const SynthData& data, const std::string& dir, const std::string& prefix) {
  save_corpus(dir + "/" + prefix + "corpus.jsonl", data.corpus);
  save_claims(dir + "/" + prefix + "claims.jsonl", data.claims);
  save_embeddings(dir + "/" + prefix + "embeddings.txt", data.table);
}

}  // namespace claimcheck
