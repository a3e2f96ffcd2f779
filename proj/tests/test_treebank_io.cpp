#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "tdlstm/conll.hpp"
#include "tdlstm/datasets.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/error.hpp"
#include "tdlstm/relation_inventory.hpp"
#include "tdlstm/synthetic.hpp"

using namespace tdlstm;
using testing_util::tree;

namespace {

std::vector<DepTree> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_conll(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return 0;
}

std::string error_message(const std::string& text) {
  try {
    parse(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

// ---------------------------------------------------------------- parse_conll

TEST(ParseConll, SingleToken) {
  auto trees = parse("1\tHello\t0\troot\n");
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(trees[0].size(), 1u);
  EXPECT_EQ(trees[0].root(), 1u);
  EXPECT_TRUE(trees[0].children(1).empty());
}

TEST(ParseConll, TwoTokenBlock) {
  auto t = tree("1\tDogs\t2\tnsubj\n2\tran\t0\troot\n");
  EXPECT_EQ(t.root(), 2u);
  EXPECT_EQ(t.children(2), (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.token(1).deprel, "nsubj");
}

TEST(ParseConll, BlankLinesSeparateSentencesAndSpacesWork) {
  auto trees = parse("\n1 a 0 root\n\n\n1 b 2 det\n2 c 0 root\n\n");
  ASSERT_EQ(trees.size(), 2u);
  EXPECT_EQ(trees[1].forms(), (std::vector<std::string>{"b", "c"}));
}

TEST(ParseConll, CycleIsReportedWithLine) {
  const std::string text = "1\ta\t2\tdep\n2\tb\t1\tdep\n";
  EXPECT_NE(error_message(text).find("cycle"), std::string::npos);
  EXPECT_GE(error_line(text), 1u);

  const std::string rooted = "# c\n1\ta\t0\troot\n2\tb\t3\tdep\n3\tc\t2\tdep\n";
  EXPECT_NE(error_message(rooted).find("cycle"), std::string::npos);
  EXPECT_EQ(error_line(rooted), 3u);
}

TEST(ParseConll, RootCountErrors) {
  EXPECT_EQ(error_line("1\ta\t0\troot\n2\tb\t0\troot\n"), 2u);
  EXPECT_NE(error_message("1\ta\t0\troot\n2\tb\t0\troot\n").find("multiple roots"),
            std::string::npos);
}

TEST(ParseConll, HeadOutOfRange) {
  EXPECT_EQ(error_line("1\ta\t0\troot\n2\tb\t7\tdep\n"), 2u);
  EXPECT_EQ(error_line("1\ta\t1\troot\n"), 1u);  // own head
}

TEST(ParseConll, MalformedLines) {
  EXPECT_EQ(error_line("1\ta\t0\troot\n2\tb\t1\n"), 2u);
  EXPECT_EQ(error_line("x\ta\t0\troot\n"), 1u);
  EXPECT_EQ(error_line("1\ta\t-1\troot\n"), 1u);
  EXPECT_EQ(error_line("1\ta\t0\troot\n3\tb\t1\tdep\n"), 2u);  // id out of sequence
}

TEST(ParseConll, ConlluColumnsAndSkippedIds) {
  const std::string text =
      "# sent_id = 7\n"
      "# text = Don't go\n"
      "1-2\tDon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tDo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
      "2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
      "3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3.1\tgone\tgo\tVERB\t_\t_\t_\t_\t3:conj\t_\n";
  auto t = tree(text);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.token(2).form, "n't");
  EXPECT_EQ(t.token(1).head, 3u);
  EXPECT_EQ(t.token(2).deprel, "advmod");
  EXPECT_EQ(t.metadata.at("sent_id"), "7");
  EXPECT_EQ(t.metadata.at("text"), "Don't go");
}

TEST(ParseConll, MissingFileIsDataError) {
  EXPECT_THROW(parse_conll_file("/nonexistent/file.conll"), DataError);
}

TEST(ParseConll, RoundTripOnRandomTrees) {
  std::mt19937_64 rng(21);
  std::vector<DepTree> trees;
  for (int i = 0; i < 100; ++i) {
    trees.push_back(random_dep_tree(1 + i % 12, rng, testing_util::words(),
                                    testing_util::relations()));
  }
  std::ostringstream out;
  write_conll(out, trees);
  auto again = parse(out.str());
  ASSERT_EQ(again.size(), trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) EXPECT_EQ(again[i].tokens(), trees[i].tokens());
}

// ---------------------------------------------------------------- tree structure

TEST(SubtreeSpan, Examples) {
  auto chain = tree("1\ta\t2\tdep\n2\tb\t3\tdep\n3\tc\t0\troot\n");
  EXPECT_EQ(subtree_span(chain, 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(subtree_span(chain, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(subtree_span(chain, 3), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(SubtreeSpan, ParentContainsChildAndRootCoversAll) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = random_dep_tree(1 + trial % 15, rng, testing_util::words(), testing_util::relations());
    auto all = subtree_span(t, t.root());
    ASSERT_EQ(all.size(), t.size());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i + 1);
    for (std::size_t node = 1; node <= t.size(); ++node) {
      auto parent = subtree_span(t, node);
      EXPECT_TRUE(std::is_sorted(parent.begin(), parent.end()));
      for (std::size_t child : t.children(node)) {
        auto c = subtree_span(t, child);
        EXPECT_TRUE(std::includes(parent.begin(), parent.end(), c.begin(), c.end()));
      }
    }
  }
}

TEST(DepTree, PostOrderVisitsChildrenFirst) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_dep_tree(1 + trial % 10, rng, testing_util::words(), testing_util::relations());
    auto order = t.post_order();
    ASSERT_EQ(order.size(), t.size());
    std::vector<std::size_t> pos(t.size() + 1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (std::size_t n = 1; n <= t.size(); ++n)
      for (std::size_t c : t.children(n)) EXPECT_LT(pos[c], pos[n]);
  }
}

TEST(DepTree, ReorderChildrenRequiresPermutation) {
  auto t = tree("1\ta\t3\tdet\n2\tb\t3\tamod\n3\tc\t0\troot\n");
  t.reorder_children(3, {2, 1});
  EXPECT_EQ(t.children(3), (std::vector<std::size_t>{2, 1}));
  EXPECT_THROW(t.reorder_children(3, {1, 1}), std::invalid_argument);
}

// ---------------------------------------------------------------- relations

TEST(RelationInventory, UniversalHas47SlotsIncludingRootAndUnk) {
  const auto& inv = RelationInventory::universal();
  EXPECT_EQ(inv.size(), 47u);
  EXPECT_EQ(inv.label(inv.root_index()), "root");
  EXPECT_EQ(inv.label(inv.unk_index()), "unk");
  for (const char* l : {"nsubj", "dobj", "nmod", "nsubjpass", "amod", "case", "neg", "obj", "obl"})
    EXPECT_TRUE(inv.find(l).has_value()) << l;
}

TEST(RelationInventory, IndexRoundTrip) {
  const auto& inv = RelationInventory::universal();
  for (std::size_t j = 0; j < inv.size(); ++j) EXPECT_EQ(inv.index_of(inv.label(j)), j);
}

TEST(RelationInventory, NormalizationAndUnknowns) {
  const auto& inv = RelationInventory::universal();
  EXPECT_EQ(normalize_deprel("nmod:poss"), "nmod");
  EXPECT_EQ(normalize_deprel("nsubj:pass"), "nsubjpass");
  EXPECT_EQ(normalize_deprel("aux:pass"), "auxpass");
  EXPECT_EQ(normalize_deprel("NSUBJ"), "nsubj");
  EXPECT_EQ(inv.index_of("nmod:tmod"), *inv.find("nmod"));
  EXPECT_EQ(inv.index_of("ROOT"), inv.root_index());
  EXPECT_EQ(inv.index_of("prep"), inv.unk_index());
  EXPECT_EQ(inv.index_of("made_up"), inv.unk_index());
}

TEST(RelationInventory, RejectsBadLabelSets) {
  EXPECT_THROW(RelationInventory({"root", "unk", "root"}), std::invalid_argument);
  EXPECT_THROW(RelationInventory({"nsubj", "unk"}), std::invalid_argument);
  EXPECT_NO_THROW(RelationInventory({"root", "unk"}));
}

// ---------------------------------------------------------------- embeddings

TEST(Embeddings, ReadsRowsForVocabulary) {
  std::istringstream in("a 1.0 2.0\nb 3 4\n");
  auto table = load_embeddings(in, {"a"}, 2);
  EXPECT_EQ(table.vocab_size(), 1u);
  EXPECT_EQ(table.vector("a"), (std::vector<double>{1, 2}));
  EXPECT_EQ(table.oov_count, 0u);
  EXPECT_THROW(table.row("b"), DataError);
}

TEST(Embeddings, OovRowsAreDeterministicAndSmall) {
  std::istringstream in1("a 1 2 3\n"), in2("a 1 2 3\n");
  auto t1 = load_embeddings(in1, {"a", "zebra"}, 3);
  auto t2 = load_embeddings(in2, {"a", "zebra"}, 3);
  EXPECT_EQ(t1.oov_count, 1u);
  EXPECT_EQ(t1.vector("zebra"), t2.vector("zebra"));
  EXPECT_EQ(t1.vector("zebra"), oov_vector("zebra", 3));
  EXPECT_NE(oov_vector("zebra", 3), oov_vector("zebras", 3));
  for (double v : oov_vector("anything", 300)) {
    EXPECT_GE(v, -0.05);
    EXPECT_LT(v, 0.05);
  }
}

TEST(Embeddings, WrongValueCountIsParseErrorWithLine) {
  std::istringstream in("a 1 2 3\nb 1 2\n");
  try {
    load_embeddings(in, {"a"}, 3);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream bad("a 1 x 3\n");
  EXPECT_THROW(load_embeddings(bad, {"a"}, 3), ParseError);
}

TEST(Embeddings, FallsBackToLowercase) {
  std::istringstream in("the 0.5 0.25\n");
  auto table = load_embeddings(in, {"The"}, 2);
  EXPECT_EQ(table.vector("The"), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(table.oov_count, 0u);
}

TEST(Embeddings, UnreadableFile) {
  EXPECT_THROW(load_embeddings(std::filesystem::path("/nonexistent/vectors.txt"), {"a"}, 2),
               DataError);
}

// ---------------------------------------------------------------- pair datasets

TEST(PairDataset, ParsesScoresAndIgnoresExtraColumns) {
  std::istringstream in(
      "pair_ID\tsentence_A\tsentence_B\trelatedness_score\tentailment_judgment\n"
      "1\tA dog runs\tA cat runs\t4.8\tNEUTRAL\n"
      "2\tx\ty\t1\tCONTRADICTION\n");
  auto rows = load_pair_dataset(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].score, 4.8);
  EXPECT_EQ(rows[0].sentence_b, "A cat runs");
  EXPECT_EQ(rows[1].id, "2");
}

TEST(PairDataset, ScoreOutOfRange) {
  std::istringstream in("pair_ID\tsentence_A\tsentence_B\trelatedness_score\n1\ta\tb\t5.1\n");
  try {
    load_pair_dataset(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream low("pair_ID\tsentence_A\tsentence_B\trelatedness_score\n1\ta\tb\t0.99\n");
  EXPECT_THROW(load_pair_dataset(low), ParseError);
}

TEST(PairDataset, MissingColumn) {
  std::istringstream in("pair_ID\tsentence_A\trelatedness_score\n1\ta\t3\n");
  try {
    load_pair_dataset(in);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence_B"), std::string::npos);
  }
}

TEST(PairDataset, AlignmentCounts) {
  std::vector<PairRecord> records(3);
  for (std::size_t i = 0; i < 3; ++i) records[i] = {std::to_string(i), "a", "b", 1.0 + i};
  std::vector<DepTree> six(6, tree("1\tx\t0\troot\n"));
  auto pairs = align_pairs(records, six);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[2].score, 3.0);
  std::vector<DepTree> five(5, tree("1\tx\t0\troot\n"));
  EXPECT_THROW(align_pairs(records, five), DataError);
}

TEST(PairDataset, PreparedFileRoundTrip) {
  std::mt19937_64 rng(2);
  auto pairs = testing_util::toy_pairs(25, rng);
  std::stringstream buf;
  write_pair_examples(buf, pairs);
  auto again = read_pair_examples(buf);
  ASSERT_EQ(again.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(again[i].id, pairs[i].id);
    EXPECT_EQ(again[i].score, pairs[i].score);  // shortest round-trip formatting
    EXPECT_EQ(again[i].left.tokens(), pairs[i].left.tokens());
    EXPECT_EQ(again[i].right.tokens(), pairs[i].right.tokens());
  }
}

TEST(PairDataset, UnscoredTreesReadForPrediction) {
  std::istringstream in("1\ta\t0\troot\n\n1\tb\t0\troot\n\n");
  auto pairs = read_pair_examples(in);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].score, 0.0);
  std::istringstream odd("1\ta\t0\troot\n");
  EXPECT_THROW(read_pair_examples(odd), DataError);
}

// ---------------------------------------------------------------- sentiment

namespace {

PhraseLexicon lexicon(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return load_phrase_labels(in);
}

// "not a good film": good <- film (amod), a <- film (det), not <- film (neg)
const char* kFilm =
    "1\tnot\t4\tneg\n"
    "2\ta\t4\tdet\n"
    "3\tgood\t4\tamod\n"
    "4\tfilm\t0\troot\n";

}  // namespace

TEST(PhraseLabels, LeafAndRootMatches) {
  auto t = tree(kFilm);
  auto lex = lexicon(
      "{\"tokens\": [\"good\"], \"label\": 1}\n"
      "{\"tokens\": [\"not\", \"a\", \"good\", \"film\"], \"label\": 0}\n");
  MatchStats stats;
  auto st = label_nodes_by_phrase(t, lex, &stats);
  EXPECT_EQ(st.node_labels.at(3), 1);
  EXPECT_EQ(st.node_labels.at(4), 0);
  EXPECT_EQ(st.node_labels.size(), 2u);
  EXPECT_EQ(stats.labeled_nodes, 2u);
  EXPECT_EQ(stats.trees_with_root_label, 1u);
  EXPECT_LT(stats.coverage(), 1.0);
}

TEST(PhraseLabels, NonContiguousSpanNeverLabeled) {
  // "very" hangs off "red" across "big".
  auto t = tree(
      "1\tred\t4\tamod\n"
      "2\tbig\t4\tamod\n"
      "3\tvery\t1\tadvmod\n"
      "4\tcar\t0\troot\n");
  // subtree(1) = {1, 3}, not contiguous.
  ASSERT_EQ(subtree_span(t, 1), (std::vector<std::size_t>{1, 3}));
  auto lex = lexicon(
      "{\"tokens\": [\"red\", \"very\"], \"label\": 1}\n"
      "{\"tokens\": [\"very\", \"red\"], \"label\": 1}\n"
      "{\"tokens\": [\"red\", \"big\", \"very\"], \"label\": 1}\n");
  MatchStats stats;
  auto st = label_nodes_by_phrase(t, lex, &stats);
  EXPECT_FALSE(st.node_labels.contains(1));
  EXPECT_EQ(stats.noncontiguous_nodes, 1u);
}

TEST(PhraseLabels, DuplicatePhraseLastWinsAndIsCounted) {
  auto lex = lexicon(
      "{\"tokens\": [\"good\"], \"label\": 1}\n"
      "{\"tokens\": [\"good\"], \"label\": 0}\n"
      "{\"tokens\": [\"film\"], \"label\": 1}\n"
      "{\"tokens\": [\"film\"], \"label\": 1}\n");
  EXPECT_EQ(lex.labels.at({"good"}), 0);
  EXPECT_EQ(lex.duplicates, 2u);
  EXPECT_EQ(lex.conflicting_duplicates, 1u);
}

TEST(PhraseLabels, MalformedJsonLines) {
  std::istringstream bad("{\"tokens\": [\"a\"], \"label\": 1}\n{\"tokens\": \"a\"}\n");
  try {
    load_phrase_labels(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream three("{\"tokens\": [\"a\"], \"label\": 3}\n");
  EXPECT_THROW(load_phrase_labels(three), ParseError);
}

TEST(SentimentFile, RoundTrip) {
  SentimentTree st{tree(kFilm), {{3, 1}, {4, 0}}};
  std::stringstream buf;
  write_sentiment_trees(buf, std::span(&st, 1));
  auto again = read_sentiment_trees(buf);
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].node_labels, st.node_labels);
  EXPECT_EQ(again[0].tree.tokens(), st.tree.tokens());

  std::istringstream bad("# labels = 9:1\n1\ta\t0\troot\n");
  EXPECT_THROW(read_sentiment_trees(bad), DataError);
}

TEST(Vocabulary, CollectsForms) {
  std::vector<DepTree> trees{tree(kFilm), tree("1\tfilm\t0\troot\n")};
  EXPECT_EQ(vocabulary(std::span<const DepTree>(trees)),
            (std::set<std::string>{"a", "film", "good", "not"}));
}
