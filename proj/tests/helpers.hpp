#pragma once

// Shared test fixtures: temp directories and tiny corpus builders.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "claimcheck/corpus.hpp"

namespace testing {

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "claimcheck_XXXXXX").string();
    char* made = mkdtemp(tmpl.data());
    if (made == nullptr) throw std::runtime_error("mkdtemp failed");
    path = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline claimcheck::AnnotatedSentence make_sentence(
    const std::string& doc_id, int index, std::vector<std::string> tokens,
    std::set<std::string> frames = {}, bool in_scope = false) {
  claimcheck::AnnotatedSentence s;
  s.doc_id = doc_id;
  s.index = index;
  for (const auto& t : tokens) s.text += s.text.empty() ? t : " " + t;
  s.tokens = std::move(tokens);
  s.frames = std::move(frames);
  s.in_scope = in_scope;
  return s;
}

inline claimcheck::AnnotatedClaim make_claim(
    const std::string& id, std::vector<std::string> tokens,
    std::set<std::string> frames = {}, std::set<std::string> entities = {},
    std::optional<claimcheck::Label> label = std::nullopt,
    std::vector<claimcheck::EvidenceGroup> evidence = {}) {
  claimcheck::AnnotatedClaim c;
  c.claim_id = id;
  for (const auto& t : tokens) c.text += c.text.empty() ? t : " " + t;
  c.tokens = std::move(tokens);
  c.frames = std::move(frames);
  c.entities = std::move(entities);
  c.gold_label = label;
  c.gold_evidence = std::move(evidence);
  return c;
}

}  // namespace testing
