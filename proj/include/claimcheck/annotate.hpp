#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "claimcheck/corpus.hpp"

namespace claimcheck {

/// Lexicon-driven stand-in for a frame-semantic parser: a lowercased trigger
/// token fires a fixed set of frames.
struct FrameLexicon {
  std::map<std::string, std::set<std::string>> entries;
};

/// Lexicon file format: JSON map {trigger: [frame, ...]}.
FrameLexicon load_lexicon(const std::string& path);

/// Union of lexicon frames over all tokens present in the lexicon.
std::set<std::string> annotate_frames(const std::vector<std::string>& tokens,
                                      const FrameLexicon& lexicon);

/// Title matching key: lowercase, spaces to underscores, trailing
/// parenthetical qualifier removed ("Foo_(film)" -> "foo").
std::string normalize_title(const std::string& title);

/// Normalized-title index over a corpus's doc_ids. A normalized key can map
/// to several canonical titles (qualifier collisions); all are reported.
struct Gazetteer {
  std::map<std::string, std::set<std::string>> canonical_by_norm;
  int max_ngram = 5;
};

Gazetteer build_gazetteer(const Corpus& corpus, int max_ngram = 5);
Gazetteer build_gazetteer(const std::set<std::string>& titles, int max_ngram = 5);

/// Every contiguous token n-gram (n <= max_ngram) whose normalized form
/// equals a document title; returns the canonical doc_ids.
std::set<std::string> annotate_entities(const std::vector<std::string>& tokens,
                                        const Gazetteer& gazetteer);
std::set<std::string> annotate_entities(const std::vector<std::string>& tokens,
                                        const std::set<std::string>& titles,
                                        int max_ngram = 5);

}  // namespace claimcheck
