#include "tdlstm/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "tdlstm/conll.hpp"
#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cols;
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::ifstream open(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " " + path.string());
  return in;
}

}  // namespace

std::vector<PairRecord> load_pair_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("pair dataset: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_tabs(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("pair dataset: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column("pair_ID");
  const std::size_t a_col = column("sentence_A");
  const std::size_t b_col = column("sentence_B");
  const std::size_t score_col = column("relatedness_score");
  const std::size_t needed = std::max({id_col, a_col, b_col, score_col}) + 1;

  std::vector<PairRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (cols.size() < needed) {
      throw ParseError(line_no, "expected at least " + std::to_string(needed) + " columns, found " +
                                    std::to_string(cols.size()));
    }
    PairRecord r;
    r.id = cols[id_col];
    r.sentence_a = cols[a_col];
    r.sentence_b = cols[b_col];
    if (!parse_double(cols[score_col], r.score)) {
      throw ParseError(line_no, "bad relatedness score '" + cols[score_col] + "'");
    }
    if (!(r.score >= 1.0 && r.score <= 5.0)) {
      throw ParseError(line_no, "relatedness score " + cols[score_col] + " outside [1, 5]");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PairRecord> load_pair_dataset(const std::filesystem::path& path) {
  auto in = open(path, "pair dataset");
  return load_pair_dataset(in);
}

std::vector<PairExample> align_pairs(std::span<const PairRecord> records,
                                     std::vector<DepTree> trees) {
  if (trees.size() != 2 * records.size()) {
    throw DataError("alignment: " + std::to_string(records.size()) + " pairs need " +
                    std::to_string(2 * records.size()) + " trees, treebank has " +
                    std::to_string(trees.size()));
  }
  std::vector<PairExample> pairs;
  pairs.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    PairExample p;
    p.id = records[i].id;
    p.score = records[i].score;
    p.left = std::move(trees[2 * i]);
    p.right = std::move(trees[2 * i + 1]);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_pair_examples(std::ostream& out, std::span<const PairExample> pairs) {
  std::vector<DepTree> trees;
  trees.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    for (const DepTree* t : {&p.left, &p.right}) {
      DepTree copy = *t;
      copy.metadata["pair_id"] = p.id;
      copy.metadata["score"] = format_double(p.score);
      copy.metadata["side"] = t == &p.left ? "A" : "B";
      trees.push_back(std::move(copy));
    }
  }
  write_conll(out, trees);
}

std::vector<PairExample> read_pair_examples(std::istream& in) {
  auto trees = parse_conll(in);
  if (trees.size() % 2 != 0) {
    throw DataError("prepared pair file holds an odd number of trees (" +
                    std::to_string(trees.size()) + ")");
  }
  std::vector<PairExample> pairs;
  for (std::size_t i = 0; i < trees.size(); i += 2) {
    PairExample p;
    const auto& meta = trees[i].metadata;
    auto id = meta.find("pair_id");
    p.id = id == meta.end() ? std::to_string(i / 2) : id->second;
    auto score = meta.find("score");
    if (score == meta.end()) {
      p.score = 0.0;  // unlabeled input (prediction)
    } else if (!parse_double(score->second, p.score) || p.score < 1.0 || p.score > 5.0) {
      throw DataError("pair " + p.id + ": bad score '" + score->second + "'");
    }
    p.left = std::move(trees[i]);
    p.right = std::move(trees[i + 1]);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<PairExample> read_pair_examples(const std::filesystem::path& path) {
  auto in = open(path, "pair file");
  return read_pair_examples(in);
}

void write_sentiment_trees(std::ostream& out, std::span<const SentimentTree> trees) {
  std::vector<DepTree> blocks;
  blocks.reserve(trees.size());
  for (const auto& st : trees) {
    DepTree copy = st.tree;
    std::ostringstream labels;
    bool first = true;
    for (const auto& [node, label] : st.node_labels) {
      if (!first) labels << ' ';
      labels << node << ':' << label;
      first = false;
    }
    copy.metadata["labels"] = labels.str();
    blocks.push_back(std::move(copy));
  }
  write_conll(out, blocks);
}

std::vector<SentimentTree> read_sentiment_trees(std::istream& in) {
  std::vector<SentimentTree> out;
  for (auto& tree : parse_conll(in)) {
    SentimentTree st;
    if (auto it = tree.metadata.find("labels"); it != tree.metadata.end()) {
      std::istringstream items(it->second);
      for (std::string item; items >> item;) {
        const auto colon = item.find(':');
        std::size_t node = 0;
        int label = -1;
        if (colon == std::string::npos ||
            std::from_chars(item.data(), item.data() + colon, node).ec != std::errc() ||
            std::from_chars(item.data() + colon + 1, item.data() + item.size(), label).ec !=
                std::errc() ||
            node < 1 || node > tree.size() || (label != 0 && label != 1)) {
          throw DataError("bad sentiment label entry '" + item + "'");
        }
        st.node_labels[node] = label;
      }
    }
    st.tree = std::move(tree);
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<SentimentTree> read_sentiment_trees(const std::filesystem::path& path) {
  auto in = open(path, "sentiment file");
  return read_sentiment_trees(in);
}

PhraseLexicon load_phrase_labels(std::istream& in) {
  PhraseLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("tokens") || !obj["tokens"].is_array() ||
        !obj.contains("label") || !obj["label"].is_number_integer()) {
      throw ParseError(line_no, "expected {\"tokens\": [...], \"label\": 0|1}");
    }
    const int label = obj["label"].get<int>();
    if (label != 0 && label != 1) throw ParseError(line_no, "label must be 0 or 1");
    std::vector<std::string> tokens;
    for (const auto& t : obj["tokens"]) {
      if (!t.is_string()) throw ParseError(line_no, "tokens must be strings");
      tokens.push_back(t.get<std::string>());
    }
    auto [it, inserted] = lex.labels.try_emplace(std::move(tokens), label);
    if (!inserted) {
      ++lex.duplicates;
      if (it->second != label) ++lex.conflicting_duplicates;
      it->second = label;
    }
  }
  return lex;
}

PhraseLexicon load_phrase_labels(const std::filesystem::path& path) {
  auto in = open(path, "phrase labels");
  return load_phrase_labels(in);
}

MatchStats& MatchStats::operator+=(const MatchStats& o) {
  trees += o.trees;
  nodes += o.nodes;
  labeled_nodes += o.labeled_nodes;
  noncontiguous_nodes += o.noncontiguous_nodes;
  trees_with_root_label += o.trees_with_root_label;
  return *this;
}

SentimentTree label_nodes_by_phrase(const DepTree& tree, const PhraseLexicon& lexicon,
                                    MatchStats* stats) {
  SentimentTree out;
  out.tree = tree;
  MatchStats local;
  local.trees = 1;
  local.nodes = tree.size();
  for (std::size_t node = 1; node <= tree.size(); ++node) {
    const auto span = subtree_span(tree, node);
    if (span.back() - span.front() + 1 != span.size()) {
      ++local.noncontiguous_nodes;
      continue;
    }
    std::vector<std::string> phrase;
    phrase.reserve(span.size());
    for (std::size_t idx : span) phrase.push_back(tree.token(idx).form);
    if (auto it = lexicon.labels.find(phrase); it != lexicon.labels.end()) {
      out.node_labels[node] = it->second;
      ++local.labeled_nodes;
    }
  }
  if (out.node_labels.contains(tree.root())) local.trees_with_root_label = 1;
  if (stats) *stats += local;
  return out;
}

std::set<std::string> vocabulary(std::span<const DepTree> trees) {
  std::set<std::string> words;
  for (const auto& t : trees) {
    for (const auto& tok : t.tokens()) words.insert(tok.form);
  }
  return words;
}

std::set<std::string> vocabulary(std::span<const PairExample> pairs) {
  std::set<std::string> words;
  for (const auto& p : pairs) {
    for (const auto& tok : p.left.tokens()) words.insert(tok.form);
    for (const auto& tok : p.right.tokens()) words.insert(tok.form);
  }
  return words;
}

std::set<std::string> vocabulary(std::span<const SentimentTree> trees) {
  std::set<std::string> words;
  for (const auto& t : trees) {
    for (const auto& tok : t.tree.tokens()) words.insert(tok.form);
  }
  return words;
}

}  // namespace tdlstm
