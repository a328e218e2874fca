#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "claimcheck/corpus.hpp"
#include "claimcheck/embed.hpp"

namespace claimcheck {

/// Generated fixture: corpus + labeled claims + embeddings that agree on a
/// vocabulary. Used by the end-to-end tests and the `synth` subcommand.
struct SynthData {
  Corpus corpus;
  std::vector<AnnotatedClaim> claims;
  EmbeddingTable table = EmbeddingTable(1);
};

/// Learnable benchmark: 60 documents x 8 sentences, 300 claims with balanced
/// SUPPORTED/REFUTED/UNSURE labels. Each claim's single gold sentence carries
/// a label-specific signal token in a 16-dim embedding space, frames are
/// planted so retrieval ranks the gold sentence first, and two in-scope
/// filler sentences per document exercise the scope channel.
SynthData make_learnable(std::uint64_t seed);

/// Ablation benchmark: 30 single-claim documents whose gold evidence groups
/// have sizes 1, 2, and 3 (10 claims each). Gold sentences match the claim's
/// frames exactly; three distractors per document match at half similarity.
/// Retrieval at K <= 3 therefore gains recall with each step and only loses
/// precision beyond K = 3.
SynthData make_ablation(std::uint64_t seed);

void save_embeddings(const std::string& path, const EmbeddingTable& table);

/// Writes <dir>/<prefix>corpus.jsonl, <prefix>claims.jsonl,
/// <prefix>embeddings.txt.
void write_synth(const SynthData& data, const std::string& dir,
                 const std::string& prefix = "");

}  // namespace claimcheck
