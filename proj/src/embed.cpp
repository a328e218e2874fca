#include "claimcheck/embed.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "claimcheck/errors.hpp"

namespace claimcheck {

void EmbeddingTable::insert(std::string token, Eigen::VectorXd vec) {
  if (vec.size() != dim_)
    throw std::invalid_argument("embedding vector has length " +
                                std::to_string(vec.size()) + ", expected " +
                                std::to_string(dim_));
  vectors_[std::move(token)] = std::move(vec);
}

const Eigen::VectorXd& EmbeddingTable::lookup(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? zero_ : it->second;
}

EmbeddingTable load_embeddings(const std::string& path, int dim) {
  if (dim <= 0) throw std::invalid_argument("embedding dim must be positive");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  EmbeddingTable table(dim);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    Eigen::VectorXd vec(dim);
    int i = 0;
    double v;
    while (i < dim && (ss >> v)) vec[i++] = v;
    double extra;
    if (i < dim || (ss >> extra)) {
      table.note_skipped();
      continue;
    }
    table.insert(std::move(token), std::move(vec));
  }
  if (table.size() == 0)
    throw ParseError(path + ": no line parsed as a " + std::to_string(dim) +
                     "-dimensional embedding");
  return table;
}

Eigen::VectorXd embed_text(const std::vector<std::string>& tokens,
                           const EmbeddingTable& table, OovPolicy oov) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
  std::size_t count = 0;
  for (const auto& tok : tokens) {
    if (oov == OovPolicy::Skip && !table.contains(tok)) continue;
    sum += table.lookup(tok);
    ++count;
  }
  if (count == 0) return sum;
  return sum / static_cast<double>(count);
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace claimcheck
