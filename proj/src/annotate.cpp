#include "claimcheck/annotate.hpp"

#include <fstream>

#include <json.hpp>

#include "claimcheck/errors.hpp"

namespace claimcheck {

FrameLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path + ": lexicon must be a JSON object");
  FrameLexicon lex;
  for (const auto& [trigger, frames] : j.items()) {
    std::set<std::string> fs;
    for (const auto& f : frames) fs.insert(f.get<std::string>());
    if (fs.empty())
      throw ValidationError(path + ": trigger \"" + trigger + "\" maps to no frames");
    lex.entries[trigger] = std::move(fs);
  }
  return lex;
}

std::set<std::string> annotate_frames(const std::vector<std::string>& tokens,
                                      const FrameLexicon& lexicon) {
  std::set<std::string> out;
  for (const auto& tok : tokens) {
    auto it = lexicon.entries.find(tok);
    if (it != lexicon.entries.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

std::string normalize_title(const std::string& title) {
  std::string norm;
  norm.reserve(title.size());
  for (char c : title) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    norm.push_back(c == ' ' ? '_' : c);
  }
  // strip a trailing parenthetical qualifier: "foo_(film)" -> "foo"
  if (!norm.empty() && norm.back() == ')') {
    auto open = norm.rfind("_(");
    if (open != std::string::npos) norm.erase(open);
  }
  while (!norm.empty() && norm.back() == '_') norm.pop_back();
  return norm;
}

Gazetteer build_gazetteer(const Corpus& corpus, int max_ngram) {
  Gazetteer gaz;
  gaz.max_ngram = max_ngram;
  for (const auto& doc : corpus.docs)
    gaz.canonical_by_norm[normalize_title(doc.doc_id)].insert(doc.doc_id);
  return gaz;
}

Gazetteer build_gazetteer(const std::set<std::string>& titles, int max_ngram) {
  Gazetteer gaz;
  gaz.max_ngram = max_ngram;
  for (const auto& t : titles) gaz.canonical_by_norm[normalize_title(t)].insert(t);
  return gaz;
}

std::set<std::string> annotate_entities(const std::vector<std::string>& tokens,
                                        const Gazetteer& gazetteer) {
  std::set<std::string> out;
  const std::size_t n = tokens.size();
  const std::size_t max_n =
      gazetteer.max_ngram > 0 ? static_cast<std::size_t>(gazetteer.max_ngram) : 1;
  for (std::size_t start = 0; start < n; ++start) {
    std::string joined;
    for (std::size_t len = 1; len <= max_n && start + len <= n; ++len) {
      if (len > 1) joined += ' ';
      joined += tokens[start + len - 1];
      auto it = gazetteer.canonical_by_norm.find(normalize_title(joined));
      if (it != gazetteer.canonical_by_norm.end())
        out.insert(it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::set<std::string> annotate_entities(const std::vector<std::string>& tokens,
                                        const std::set<std::string>& titles,
                                        int max_ngram) {
  return annotate_entities(tokens, build_gazetteer(titles, max_ngram));
}

}  // namespace claimcheck
