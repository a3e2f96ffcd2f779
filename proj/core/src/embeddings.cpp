#include "tdlstm/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <random>

#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Tensor matrix)
    : words_(std::move(words)), table_("embeddings", std::move(matrix)) {
  if (table_.value.rank() != 2 || table_.value.rows() != words_.size()) {
    throw DimensionError("embedding matrix " + shape_string(table_.value.shape()) + " for " +
                         std::to_string(words_.size()) + " words");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingTable::row(std::string_view word) const {
  if (auto r = find(word)) return *r;
  throw DataError("no embedding row for word '" + std::string(word) + "'");
}

std::vector<double> EmbeddingTable::vector(std::string_view word) const {
  const std::size_t r = row(word);
  const auto& v = table_.value.values();
  const auto first = v.begin() + static_cast<std::ptrdiff_t>(r * dim());
  return {first, first + static_cast<std::ptrdiff_t>(dim())};
}

std::vector<double> oov_vector(std::string_view word, std::size_t dim) {
  std::mt19937_64 rng(fnv1a(word));
  std::vector<double> out(dim);
  for (auto& x : out) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = (2.0 * unit - 1.0) * 0.05;
  }
  return out;
}

EmbeddingTable load_embeddings(std::istream& in, const std::set<std::string>& vocab,
                               std::size_t dim) {
  std::unordered_map<std::string, std::vector<double>> found;
  std::set<std::string> wanted(vocab);
  for (const auto& w : vocab) wanted.insert(lowercase(w));

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) throw ParseError(line_no, "embedding line has no values");
    const std::string word = line.substr(0, space);

    std::size_t count = 0;
    bool in_field = false;
    for (std::size_t i = space; i < line.size(); ++i) {
      const bool sep = line[i] == ' ' || line[i] == '\t';
      if (!sep && !in_field) ++count;
      in_field = !sep;
    }
    if (count != dim) {
      throw ParseError(line_no, "embedding for '" + word + "' has " + std::to_string(count) +
                                    " values, expected " + std::to_string(dim));
    }
    if (!wanted.contains(word) || found.contains(word)) continue;

    std::vector<double> values;
    values.reserve(dim);
    const char* p = line.data() + space;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p >= end) break;
      char* next = nullptr;
      const double v = std::strtod(p, &next);
      if (next == p || !std::isfinite(v)) {
        throw ParseError(line_no, "bad number in embedding for '" + word + "'");
      }
      values.push_back(v);
      p = next;
    }
    found.emplace(word, std::move(values));
  }

  std::vector<std::string> words(vocab.begin(), vocab.end());
  Tensor matrix = Tensor::matrix(words.size(), dim);
  std::size_t oov = 0;
  for (std::size_t r = 0; r < words.size(); ++r) {
    const std::vector<double>* src = nullptr;
    if (auto it = found.find(words[r]); it != found.end()) {
      src = &it->second;
    } else if (auto lo = found.find(lowercase(words[r])); lo != found.end()) {
      src = &lo->second;
    }
    const std::vector<double> row = src ? *src : oov_vector(words[r], dim);
    if (!src) ++oov;
    std::copy(row.begin(), row.end(), matrix.values().begin() + static_cast<std::ptrdiff_t>(r * dim));
  }
  EmbeddingTable table(std::move(words), std::move(matrix));
  table.oov_count = oov;
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::set<std::string>& vocab, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path.string());
  return load_embeddings(in, vocab, dim);
}

}  // namespace tdlstm
