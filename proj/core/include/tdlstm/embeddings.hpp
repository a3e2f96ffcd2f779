#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdlstm/tensor.hpp"

namespace tdlstm {

// Word vectors as the rows of one matrix Parameter (|V| x e).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> words, Tensor matrix);

  std::size_t dim() const { return table_.value.cols(); }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<std::size_t> find(std::string_view word) const;
  // Throws DataError for words outside the table.
  std::size_t row(std::string_view word) const;
  std::vector<double> vector(std::string_view word) const;

  Parameter& parameter() { return table_; }
  const Parameter& parameter() const { return table_; }

  // Words that were not found in the source file.
  std::size_t oov_count = 0;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  Parameter table_;
};

// Deterministic stand-in vector for a word missing from the embedding file:
// uniform(-0.05, 0.05) draws from a generator seeded by a hash of the word.
std::vector<double> oov_vector(std::string_view word, std::size_t dim);

// Reads "word v1 ... v_e" lines and builds a table covering exactly `vocab`
// (sorted). A vocabulary word absent from the file falls back to its
// lowercase form, then to oov_vector(). Every line must carry exactly `dim`
// values.
EmbeddingTable load_embeddings(std::istream& in, const std::set<std::string>& vocab,
                               std::size_t dim);
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::set<std::string>& vocab, std::size_t dim);

}  // namespace tdlstm
