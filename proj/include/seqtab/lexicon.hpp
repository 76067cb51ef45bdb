#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace seqtab {

// Referential expressions that point back at the previous question or its
// answer. Entries are lowercase and whitespace-normalized.
struct ReferentialLexicon {
  std::vector<std::string> expressions = {"ones", "them", "those", "that", "these", "of those", "of them"};

  static ReferentialLexicon defaults() { return {}; }

  // Expressions occurring in the text as whole-token sequences, in lexicon
  // order.
  std::vector<std::string> find_in(std::string_view text) const;
  bool matches(std::string_view text) const { return !find_in(text).empty(); }
};

}  // namespace seqtab
