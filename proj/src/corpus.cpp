#include "claimcheck/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "claimcheck/errors.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/rng.hpp"

namespace claimcheck {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Label label) {
  switch (label) {
    case Label::Supported: return "SUPPORTED";
    case Label::Refuted: return "REFUTED";
    case Label::Unsure: return "UNSURE";
  }
  return "UNSURE";
}

Label parse_label(const std::string& s) {
  if (s == "SUPPORTED" || s == "SUPPORTS") return Label::Supported;
  if (s == "REFUTED" || s == "REFUTES") return Label::Refuted;
  if (s == "UNSURE" || s == "NOT ENOUGH INFO") return Label::Unsure;
  throw ParseError("unknown label string \"" + s + "\"");
}

namespace {

bool is_space_cp(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\r': case U'\n': case U'\f': case U'\v':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Minimal UTF-8 decode; invalid bytes pass through as single code points.
char32_t next_cp(const std::string& s, std::size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  int extra = 0;
  char32_t cp = c;
  if (c >= 0xF0) { extra = 3; cp = c & 0x07; }
  else if (c >= 0xE0) { extra = 2; cp = c & 0x0F; }
  else if (c >= 0xC0) { extra = 1; cp = c & 0x1F; }
  std::size_t start = i++;
  for (int k = 0; k < extra && i < s.size(); ++k) {
    unsigned char cc = static_cast<unsigned char>(s[i]);
    if ((cc & 0xC0) != 0x80) return static_cast<unsigned char>(s[start]);
    cp = (cp << 6) | (cc & 0x3F);
    ++i;
  }
  return extra == 0 ? c : cp;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string strip_punct(const std::string& tok) {
  std::size_t b = 0, e = tok.size();
  while (b < e && is_ascii_punct(tok[b])) ++b;
  while (e > b && is_ascii_punct(tok[e - 1])) --e;
  // all-punctuation tokens survive unchanged so text like "..." still yields
  // a token and the non-empty-tokens invariant holds
  if (b == e) return tok;
  return tok.substr(b, e - b);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(strip_punct(cur));
      cur.clear();
    }
  };
  while (i < text.size()) {
    std::size_t start = i;
    char32_t cp = next_cp(text, i);
    if (is_space_cp(cp)) {
      flush();
    } else {
      for (std::size_t k = start; k < i; ++k) {
        char c = text[k];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        cur.push_back(c);
      }
    }
  }
  flush();
  return out;
}

void Corpus::add(AnnotatedDocument doc) {
  if (doc.doc_id.empty()) throw ValidationError("document with empty doc_id");
  if (index.count(doc.doc_id))
    throw ValidationError("duplicate doc_id \"" + doc.doc_id + "\"");
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    auto& s = doc.sentences[i];
    if (s.index != static_cast<int>(i))
      throw ValidationError("doc \"" + doc.doc_id +
                            "\": sentence indices not contiguous at position " +
                            std::to_string(i));
    s.doc_id = doc.doc_id;
  }
  index.emplace(doc.doc_id, docs.size());
  docs.push_back(std::move(doc));
}

const AnnotatedDocument* Corpus::find(const std::string& doc_id) const {
  auto it = index.find(doc_id);
  return it == index.end() ? nullptr : &docs[it->second];
}

const AnnotatedSentence* Corpus::find_sentence(const SentenceRef& ref) const {
  const AnnotatedDocument* doc = find(ref.doc_id);
  if (!doc) return nullptr;
  if (ref.index < 0 || ref.index >= static_cast<int>(doc->sentences.size()))
    return nullptr;
  return &doc->sentences[static_cast<std::size_t>(ref.index)];
}

namespace {

AnnotatedSentence sentence_from_json(const json& j) {
  AnnotatedSentence s;
  s.index = j.at("index").get<int>();
  s.text = j.value("text", std::string{});
  if (j.contains("tokens")) s.tokens = j.at("tokens").get<std::vector<std::string>>();
  if (s.tokens.empty() && !s.text.empty()) s.tokens = tokenize(s.text);
  if (j.contains("frames"))
    for (const auto& f : j.at("frames")) s.frames.insert(f.get<std::string>());
  s.in_scope = j.value("in_scope", false);
  return s;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  Corpus corpus;
  for_each_jsonl(path, [&](std::size_t line_no, const json& j) {
    AnnotatedDocument doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (j.contains("sentences"))
      for (const auto& sj : j.at("sentences")) doc.sentences.push_back(sentence_from_json(sj));
    try {
      corpus.add(std::move(doc));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return corpus;
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& doc : corpus.docs) {
    ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["sentences"] = ordered_json::array();
    for (const auto& s : doc.sentences) {
      ordered_json sj;
      sj["index"] = s.index;
      sj["text"] = s.text;
      sj["tokens"] = s.tokens;
      sj["frames"] = s.frames;
      sj["in_scope"] = s.in_scope;
      j["sentences"].push_back(std::move(sj));
    }
    out << j.dump() << "\n";
  }
}

std::vector<AnnotatedClaim> load_claims(const std::string& path) {
  std::vector<AnnotatedClaim> claims;
  std::set<std::string> seen;
  for_each_jsonl(path, [&](std::size_t line_no, const json& j) {
    AnnotatedClaim c;
    c.claim_id = j.at("claim_id").get<std::string>();
    c.text = j.value("text", std::string{});
    if (j.contains("tokens")) c.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (c.tokens.empty() && !c.text.empty()) c.tokens = tokenize(c.text);
    if (j.contains("frames"))
      for (const auto& f : j.at("frames")) c.frames.insert(f.get<std::string>());
    if (j.contains("entities"))
      for (const auto& e : j.at("entities")) c.entities.insert(e.get<std::string>());
    auto fail = [&](const std::string& msg) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (j.contains("label") && !j.at("label").is_null()) {
      try {
        c.gold_label = parse_label(j.at("label").get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (j.contains("evidence") && !j.at("evidence").is_null()) {
      for (const auto& gj : j.at("evidence")) {
        EvidenceGroup group;
        for (const auto& pair : gj) {
          if (!pair.is_array() || pair.size() != 2)
            fail("evidence entry must be a [doc_id, sentence_index] pair");
          group.insert(SentenceRef{pair[0].get<std::string>(), pair[1].get<int>()});
        }
        c.gold_evidence.push_back(std::move(group));
      }
    }
    if (c.gold_label == Label::Unsure && !c.gold_evidence.empty())
      fail("UNSURE claim \"" + c.claim_id + "\" carries gold evidence");
    if (c.gold_label && *c.gold_label != Label::Unsure)
      for (const auto& g : c.gold_evidence)
        if (g.empty()) fail("claim \"" + c.claim_id + "\" has an empty evidence group");
    if (!seen.insert(c.claim_id).second)
      fail("duplicate claim_id \"" + c.claim_id + "\"");
    claims.push_back(std::move(c));
  });
  return claims;
}

void save_claims(const std::string& path, const std::vector<AnnotatedClaim>& claims) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& c : claims) {
    ordered_json j;
    j["claim_id"] = c.claim_id;
    j["text"] = c.text;
    j["tokens"] = c.tokens;
    j["frames"] = c.frames;
    j["entities"] = c.entities;
    if (c.gold_label) j["label"] = to_string(*c.gold_label);
    if (!c.gold_evidence.empty()) {
      ordered_json groups = ordered_json::array();
      for (const auto& g : c.gold_evidence) {
        ordered_json group = ordered_json::array();
        for (const auto& ref : g) group.push_back({ref.doc_id, ref.index});
        groups.push_back(std::move(group));
      }
      j["evidence"] = std::move(groups);
    }
    out << j.dump() << "\n";
  }
}

std::vector<FoldSplit> kfold_split(const std::vector<AnnotatedClaim>& claims,
                                   int k, std::uint64_t seed, bool stratify) {
  const std::size_t n = claims.size();
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("kfold_split: k exceeds number of claims");

  Rng rng(seed);
  std::vector<std::size_t> fold_of(n);

  if (!stratify) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    // first (n % k) folds absorb the remainder
    std::size_t base = n / static_cast<std::size_t>(k);
    std::size_t rem = n % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
      std::size_t take = base + (f < rem ? 1 : 0);
      for (std::size_t t = 0; t < take; ++t) fold_of[order[pos++]] = f;
    }
  } else {
    // strata: SUPPORTED, REFUTED, UNSURE, unlabeled; dealt round-robin
    std::vector<std::vector<std::size_t>> strata(4);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t s = claims[i].gold_label
                          ? static_cast<std::size_t>(*claims[i].gold_label)
                          : 3u;
      strata[s].push_back(i);
    }
    std::size_t dealt = 0;
    for (auto& stratum : strata) {
      rng.shuffle(stratum);
      for (std::size_t idx : stratum) fold_of[idx] = dealt++ % static_cast<std::size_t>(k);
    }
  }

  std::vector<FoldSplit> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
      if (f == fold_of[i])
        folds[f].test.push_back(i);
      else
        folds[f].train.push_back(i);
    }
  }
  return folds;
}

}  // namespace claimcheck
