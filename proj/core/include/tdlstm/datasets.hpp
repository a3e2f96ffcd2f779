#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tdlstm/dep_tree.hpp"

namespace tdlstm {

// One row of a relatedness TSV.
struct PairRecord {
  std::string id;
  std::string sentence_a;
  std::string sentence_b;
  double score = 0.0;
};

struct PairExample {
  std::string id;
  DepTree left;
  DepTree right;
  double score = 0.0;
};

// Binary sentiment labels on a subset of tree nodes.
struct SentimentTree {
  DepTree tree;
  std::map<std::size_t, int> node_labels;
};

// Tab-separated with header; needs pair_ID, sentence_A, sentence_B and
// relatedness_score columns (others ignored). Scores must lie in [1, 5].
std::vector<PairRecord> load_pair_dataset(std::istream& in);
std::vector<PairRecord> load_pair_dataset(const std::filesystem::path& path);

// Pairs the i-th record with trees 2i (sentence A) and 2i+1 (sentence B).
std::vector<PairExample> align_pairs(std::span<const PairRecord> records,
                                     std::vector<DepTree> trees);

// Prepared relatedness file: CoNLL blocks in A/B order, each carrying
// "# pair_id" and "# score" comments.
void write_pair_examples(std::ostream& out, std::span<const PairExample> pairs);
std::vector<PairExample> read_pair_examples(std::istream& in);
std::vector<PairExample> read_pair_examples(const std::filesystem::path& path);

// Prepared sentiment file: CoNLL blocks with a "# labels = node:label ..."
// comment.
void write_sentiment_trees(std::ostream& out, std::span<const SentimentTree> trees);
std::vector<SentimentTree> read_sentiment_trees(std::istream& in);
std::vector<SentimentTree> read_sentiment_trees(const std::filesystem::path& path);

// Phrase -> label dictionary read from JSON lines {"tokens": [...], "label": 0|1}.
// A phrase listed twice keeps its last label; the repeat is counted.
struct PhraseLexicon {
  std::map<std::vector<std::string>, int> labels;
  std::size_t duplicates = 0;
  std::size_t conflicting_duplicates = 0;
};
PhraseLexicon load_phrase_labels(std::istream& in);
PhraseLexicon load_phrase_labels(const std::filesystem::path& path);

struct MatchStats {
  std::size_t trees = 0;
  std::size_t nodes = 0;
  std::size_t labeled_nodes = 0;
  std::size_t noncontiguous_nodes = 0;
  std::size_t trees_with_root_label = 0;

  double coverage() const {
    return nodes == 0 ? 0.0 : static_cast<double>(labeled_nodes) / static_cast<double>(nodes);
  }
  MatchStats& operator+=(const MatchStats& o);
};

// Labels node t iff its subtree span is a contiguous index range whose forms
// equal a lexicon phrase.
SentimentTree label_nodes_by_phrase(const DepTree& tree, const PhraseLexicon& lexicon,
                                    MatchStats* stats = nullptr);

// Words used by a set of trees.
std::set<std::string> vocabulary(std::span<const DepTree> trees);
std::set<std::string> vocabulary(std::span<const PairExample> pairs);
std::set<std::string> vocabulary(std::span<const SentimentTree> trees);

}  // namespace tdlstm
