#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "claimcheck/corpus.hpp"
#include "claimcheck/errors.hpp"
#include "helpers.hpp"

using namespace claimcheck;
using testing::TempDir;
using testing::write_file;

TEST_CASE("tokenize lowercases, splits, strips edge punctuation") {
  CHECK(tokenize("The cat sat.") == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(tokenize("Obama, (born 1961)") ==
        std::vector<std::string>{"obama", "born", "1961"});
  CHECK(tokenize("  a\t b\nc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("").empty());
  // all-punctuation tokens survive so no token is ever empty
  CHECK(tokenize("...") == std::vector<std::string>{"..."});
}

TEST_CASE("label parsing accepts canonical names and FEVER aliases") {
  CHECK(parse_label("SUPPORTED") == Label::Supported);
  CHECK(parse_label("SUPPORTS") == Label::Supported);
  CHECK(parse_label("REFUTED") == Label::Refuted);
  CHECK(parse_label("REFUTES") == Label::Refuted);
  CHECK(parse_label("UNSURE") == Label::Unsure);
  CHECK(parse_label("NOT ENOUGH INFO") == Label::Unsure);
  CHECK_THROWS_AS(parse_label("MAYBE"), ParseError);
  for (Label l : {Label::Supported, Label::Refuted, Label::Unsure})
    CHECK(parse_label(to_string(l)) == l);
}

TEST_CASE("corpus add validates doc ids and sentence numbering") {
  Corpus corpus;
  AnnotatedDocument doc;
  doc.doc_id = "A";
  doc.sentences.push_back(testing::make_sentence("", 0, {"x"}));
  doc.sentences.push_back(testing::make_sentence("", 1, {"y"}));
  corpus.add(doc);
  CHECK(corpus.size() == 1);
  CHECK(corpus.find("A") != nullptr);
  CHECK(corpus.find("B") == nullptr);
  const AnnotatedSentence* s = corpus.find_sentence({"A", 1});
  REQUIRE(s != nullptr);
  CHECK(s->tokens == std::vector<std::string>{"y"});
  CHECK(s->doc_id == "A");  // stamped by add()
  CHECK(corpus.find_sentence({"A", 7}) == nullptr);

  CHECK_THROWS_WITH_AS(corpus.add(doc), doctest::Contains("A"), ValidationError);

  AnnotatedDocument gap;
  gap.doc_id = "B";
  gap.sentences.push_back(testing::make_sentence("", 0, {"x"}));
  gap.sentences.push_back(testing::make_sentence("", 2, {"y"}));
  CHECK_THROWS_AS(corpus.add(gap), ValidationError);

  AnnotatedDocument anon;
  CHECK_THROWS_AS(corpus.add(anon), ValidationError);
}

TEST_CASE("corpus JSONL round trip") {
  TempDir dir;
  Corpus corpus;
  AnnotatedDocument doc;
  doc.doc_id = "Lorelai_Gilmore";
  doc.sentences.push_back(
      testing::make_sentence("", 0, {"a", "character"}, {"People"}, true));
  doc.sentences.push_back(testing::make_sentence("", 1, {"later", "on"}, {}, false));
  corpus.add(doc);

  const std::string path = dir.file("corpus.jsonl");
  save_corpus(path, corpus);
  Corpus loaded = load_corpus(path);
  REQUIRE(loaded.size() == 1);
  REQUIRE(loaded.docs[0].sentences.size() == 2);
  CHECK(loaded.docs[0].doc_id == "Lorelai_Gilmore");
  CHECK(loaded.docs[0].sentences[0].frames == std::set<std::string>{"People"});
  CHECK(loaded.docs[0].sentences[0].in_scope);
  CHECK_FALSE(loaded.docs[0].sentences[1].in_scope);
  CHECK(loaded.docs[0].sentences[1].tokens ==
        std::vector<std::string>{"later", "on"});
}

TEST_CASE("corpus loader rejects bad lines with location") {
  TempDir dir;
  const std::string path = dir.file("bad.jsonl");

  write_file(path, "");
  CHECK(load_corpus(path).size() == 0);

  write_file(path, "{\"doc_id\": \"A\", \"sentences\": []}\nnot json\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains(":2"), ParseError);

  write_file(path,
             "{\"doc_id\": \"A\", \"sentences\": []}\n"
             "{\"doc_id\": \"A\", \"sentences\": []}\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("A"), ValidationError);

  CHECK_THROWS_AS(load_corpus(dir.file("missing.jsonl")), IoError);
}

TEST_CASE("claims JSONL round trip with labels and evidence groups") {
  TempDir dir;
  std::vector<AnnotatedClaim> claims;
  claims.push_back(testing::make_claim(
      "c1", {"the", "cat", "sat"}, {"Posture"}, {"Cat"}, Label::Supported,
      {{{"Cat", 0}}, {{"Cat", 2}, {"Mat", 1}}}));
  claims.push_back(testing::make_claim("c2", {"unknown"}, {}, {}, Label::Unsure, {}));

  const std::string path = dir.file("claims.jsonl");
  save_claims(path, claims);
  auto loaded = load_claims(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].gold_label == Label::Supported);
  REQUIRE(loaded[0].gold_evidence.size() == 2);
  CHECK(loaded[0].gold_evidence[1] ==
        EvidenceGroup{{"Cat", 2}, {"Mat", 1}});
  CHECK(loaded[0].frames == std::set<std::string>{"Posture"});
  CHECK(loaded[1].gold_label == Label::Unsure);
  CHECK(loaded[1].gold_evidence.empty());
}

TEST_CASE("claims loader maps NOT ENOUGH INFO and rejects unknown labels") {
  TempDir dir;
  const std::string path = dir.file("claims.jsonl");
  write_file(path,
             "{\"claim_id\": \"c1\", \"text\": \"x\", \"label\": \"NOT ENOUGH INFO\"}\n");
  auto loaded = load_claims(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].gold_label == Label::Unsure);

  write_file(path, "{\"claim_id\": \"c1\", \"text\": \"x\", \"label\": \"MAYBE\"}\n");
  CHECK_THROWS_AS(load_claims(path), ParseError);
}

namespace {

std::vector<AnnotatedClaim> dummy_claims(std::size_t n) {
  std::vector<AnnotatedClaim> claims(n);
  for (std::size_t i = 0; i < n; ++i) claims[i].claim_id = "c" + std::to_string(i);
  return claims;
}

// Each index appears in exactly one test fold, and train is its complement.
void check_partition(const std::vector<FoldSplit>& folds, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& fold : folds) {
    for (std::size_t i : fold.test) seen[i]++;
    std::set<std::size_t> test(fold.test.begin(), fold.test.end());
    CHECK(fold.train.size() + fold.test.size() == n);
    for (std::size_t i : fold.train) CHECK(test.count(i) == 0);
  }
  CHECK(std::count(seen.begin(), seen.end(), 1) == static_cast<long>(n));
}

}  // namespace

TEST_CASE("kfold partitions evenly and deterministically") {
  auto claims = dummy_claims(10);
  auto folds = kfold_split(claims, 5, 42);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) CHECK(f.test.size() == 2);
  check_partition(folds, 10);

  auto again = kfold_split(claims, 5, 42);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(again[i].test == folds[i].test);
    CHECK(again[i].train == folds[i].train);
  }

  auto other_seed = kfold_split(claims, 5, 43);
  bool any_difference = false;
  for (std::size_t i = 0; i < 5; ++i)
    if (other_seed[i].test != folds[i].test) any_difference = true;
  CHECK(any_difference);

  CHECK_THROWS_AS(kfold_split(claims, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(kfold_split(claims, 11, 0), std::invalid_argument);
}

TEST_CASE("kfold at FEVER train scale gives near-30K folds") {
  auto claims = dummy_claims(145449);
  auto folds = kfold_split(claims, 5, 7);
  std::size_t total = 0;
  int big = 0;
  for (const auto& f : folds) {
    CHECK((f.test.size() == 29090 || f.test.size() == 29089));
    if (f.test.size() == 29090) ++big;
    total += f.test.size();
  }
  CHECK(total == 145449);
  CHECK(big == 4);
}

TEST_CASE("stratified kfold balances labels per fold") {
  std::vector<AnnotatedClaim> claims;
  for (int i = 0; i < 90; ++i) {
    auto c = testing::make_claim("c" + std::to_string(i), {"t"});
    c.gold_label = static_cast<Label>(i % 3);
    claims.push_back(c);
  }
  auto folds = kfold_split(claims, 3, 11, true);
  check_partition(folds, 90);
  for (const auto& fold : folds) {
    int counts[3] = {0, 0, 0};
    for (std::size_t i : fold.test) counts[static_cast<int>(*claims[i].gold_label)]++;
    CHECK(counts[0] == 10);
    CHECK(counts[1] == 10);
    CHECK(counts[2] == 10);
  }
}
