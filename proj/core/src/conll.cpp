#include "tdlstm/conll.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

std::vector<std::string> split_columns(const std::string& line) {
  std::vector<std::string> cols;
  if (line.find('\t') != std::string::npos) {
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
  } else {
    std::istringstream words(line);
    for (std::string w; words >> w;) cols.push_back(w);
  }
  return cols;
}

bool parse_index(const std::string& text, std::size_t& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !text.empty();
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<DepTree> parse_conll(std::istream& in) {
  std::vector<DepTree> trees;
  std::vector<DepToken> tokens;
  std::vector<std::size_t> lines;
  std::map<std::string, std::string> metadata;

  auto finish = [&] {
    if (!tokens.empty()) {
      DepTree tree = DepTree::build(std::move(tokens), lines);
      tree.metadata = std::move(metadata);
      trees.push_back(std::move(tree));
    }
    tokens.clear();
    lines.clear();
    metadata.clear();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      finish();
      continue;
    }
    if (line[0] == '#') {
      const std::string body = line.substr(1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        metadata[trim(body)] = "";
      } else {
        metadata[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      }
      continue;
    }
    const auto cols = split_columns(line);
    if (cols.size() != 4 && cols.size() != 10) {
      throw ParseError(line_no, "expected 4 or 10 columns, found " + std::to_string(cols.size()));
    }
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;

    const std::string& head_text = cols.size() == 4 ? cols[2] : cols[6];
    const std::string& deprel = cols.size() == 4 ? cols[3] : cols[7];
    DepToken token;
    if (!parse_index(id, token.index)) throw ParseError(line_no, "bad token id '" + id + "'");
    if (!parse_index(head_text, token.head)) {
      throw ParseError(line_no, "bad head '" + head_text + "'");
    }
    token.form = cols[1];
    token.deprel = deprel;
    if (token.form.empty() || token.deprel.empty()) {
      throw ParseError(line_no, "empty form or dependency label");
    }
    tokens.push_back(std::move(token));
    lines.push_back(line_no);
  }
  finish();
  return trees;
}

std::vector<DepTree> parse_conll_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open treebank " + path.string());
  return parse_conll(in);
}

void write_conll(std::ostream& out, std::span<const DepTree> trees) {
  for (const DepTree& tree : trees) {
    for (const auto& [key, value] : tree.metadata) {
      out << "# " << key;
      if (!value.empty()) out << " = " << value;
      out << '\n';
    }
    for (const DepToken& t : tree.tokens()) {
      out << t.index << '\t' << t.form << '\t' << t.head << '\t' << t.deprel << '\n';
    }
    out << '\n';
  }
}

}  // namespace tdlstm
