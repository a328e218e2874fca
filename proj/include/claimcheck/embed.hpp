#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace claimcheck {

/// Pretrained word vectors, GloVe-style text format. Unknown tokens look up
/// as the zero vector.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim)
      : dim_(dim), zero_(Eigen::VectorXd::Zero(dim)) {}

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t skipped_lines() const { return skipped_; }

  void insert(std::string token, Eigen::VectorXd vec);
  const Eigen::VectorXd& lookup(const std::string& token) const;
  bool contains(const std::string& token) const { return vectors_.count(token) > 0; }
  const std::unordered_map<std::string, Eigen::VectorXd>& entries() const { return vectors_; }

  void note_skipped() { ++skipped_; }

 private:
  int dim_;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
  Eigen::VectorXd zero_;
  std::size_t skipped_ = 0;
};

/// Reads "token v1 v2 ... vdim" lines. Lines with the wrong arity or
/// non-numeric values are skipped and counted in skipped_lines().
/// Throws IoError if unreadable, ParseError if no line parses.
EmbeddingTable load_embeddings(const std::string& path, int dim);

enum class OovPolicy {
  Zero,  // unknown tokens contribute zero vectors and count in the mean
  Skip,  // unknown tokens are dropped from the mean
};

/// Average bag-of-words representation. Empty token list (or, under Skip,
/// no known token) gives the zero vector.
Eigen::VectorXd embed_text(const std::vector<std::string>& tokens,
                           const EmbeddingTable& table,
                           OovPolicy oov = OovPolicy::Zero);

/// Cosine similarity; 0 by convention when either norm is 0.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace claimcheck
