#include "seqtab/lexicon.hpp"

#include "seqtab/text.hpp"

namespace seqtab {

std::vector<std::string> ReferentialLexicon::find_in(std::string_view text) const {
  const auto toks = text::tokenize(text);
  std::vector<std::string> found;
  for (const auto& expr : expressions) {
    const auto want = text::tokenize(expr);
    if (want.empty() || want.size() > toks.size()) continue;
    for (size_t i = 0; i + want.size() <= toks.size(); ++i) {
      bool hit = true;
      for (size_t k = 0; k < want.size() && hit; ++k) hit = toks[i + k] == want[k];
      if (hit) {
        found.push_back(expr);
        break;
      }
    }
  }
  return found;
}

}  // namespace seqtab
