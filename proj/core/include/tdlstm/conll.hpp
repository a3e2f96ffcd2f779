#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "tdlstm/dep_tree.hpp"

namespace tdlstm {

// Reads blank-line separated sentences. Each token line carries either the
// reduced 4-column profile (ID FORM HEAD DEPREL) or full 10-column CoNLL-U,
// from which columns 1, 2, 7 and 8 are read. Multiword ranges (3-4) and empty
// nodes (5.1) are skipped. "# key = value" comments become tree metadata.
// Errors are ParseError with the offending line number.
std::vector<DepTree> parse_conll(std::istream& in);
std::vector<DepTree> parse_conll_file(const std::filesystem::path& path);

// Writes the 4-column profile plus metadata comments.
void write_conll(std::ostream& out, std::span<const DepTree> trees);

}  // namespace tdlstm
