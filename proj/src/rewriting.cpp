#include "seqtab/rewriting.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_set>

#include "seqtab/text.hpp"

namespace seqtab {

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",     "about", "after", "all",   "also",  "an",    "and",   "any",    "are",   "as",    "at",
      "be",    "been",  "before", "both", "but",   "by",    "can",   "could",  "did",   "do",    "does",
      "each",  "every", "for",   "from",  "had",   "has",   "have",  "he",     "her",   "his",   "how",
      "i",     "if",    "in",    "into",  "is",    "it",    "its",   "least",  "less",  "list",  "many",
      "me",    "more",  "most",  "much",  "name",  "names", "no",    "not",    "of",    "on",    "one",
      "ones",  "only",  "or",    "other", "s",     "same",  "she",   "so",     "some",  "tell",  "than",
      "that",  "the",   "their", "them",  "then",  "there", "these", "they",   "this",  "those", "to",
      "was",   "were",  "what",  "when",  "where", "which", "while", "who",    "whom",  "whose", "why",
      "will",  "with",  "would", "you",   "your",  "give",  "show",  "find",   "provide"};
  return words;
}

bool is_token_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

struct Span {
  size_t begin = 0;
  size_t end = 0;
  std::string token;
};

std::vector<Span> token_spans(std::string_view s) {
  std::vector<Span> out;
  size_t i = 0;
  while (i < s.size()) {
    if (!is_token_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    Span sp;
    sp.begin = i;
    while (i < s.size() && is_token_byte(static_cast<unsigned char>(s[i]))) {
      sp.token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i]))));
      ++i;
    }
    sp.end = i;
    out.push_back(std::move(sp));
  }
  return out;
}

// Replaces the first whole-token occurrence of expr; nullopt if absent.
std::optional<std::string> replace_expression(const std::string& text, const std::string& expr,
                                              const std::string& replacement) {
  const auto spans = token_spans(text);
  const auto want = text::tokenize(expr);
  if (want.empty()) return std::nullopt;
  for (size_t i = 0; i + want.size() <= spans.size(); ++i) {
    bool hit = true;
    for (size_t k = 0; k < want.size() && hit; ++k) hit = spans[i + k].token == want[k];
    if (hit) {
      const size_t b = spans[i].begin, e = spans[i + want.size() - 1].end;
      return text.substr(0, b) + replacement + text.substr(e);
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> candidate_noun_phrases(std::string_view question) {
  const auto toks = text::tokenize(question);
  std::vector<std::string> out;
  auto add = [&](const std::string& np) {
    if (std::find(out.begin(), out.end(), np) == out.end()) out.push_back(np);
  };
  size_t i = 0;
  while (i < toks.size()) {
    if (stopwords().count(toks[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < toks.size() && !stopwords().count(toks[j])) ++j;
    std::vector<std::string> run(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(j));
    if (run.size() <= 4) {
      add(text::join(run, " "));
    } else {
      for (size_t k = 0; k + 4 <= run.size(); ++k) {
        add(text::join(std::vector<std::string>(run.begin() + static_cast<long>(k), run.begin() + static_cast<long>(k + 4)), " "));
      }
    }
    i = j;
  }
  return out;
}

std::vector<std::string> rewrite_question_variants(const std::string& current, const std::string& previous,
                                                   const ReferentialLexicon& lexicon) {
  std::vector<std::string> variants = {current};
  const auto nps = candidate_noun_phrases(previous);
  for (const auto& expr : lexicon.find_in(current)) {
    for (const auto& np : nps) {
      if (auto v = replace_expression(current, expr, np)) variants.push_back(std::move(*v));
    }
  }
  return variants;
}

TableParser primitive_parser(size_t beam_limit, std::optional<size_t> cap) {
  return [beam_limit, cap](const std::string& question, const Table& table) {
    const CandidateSet set = generate_candidates(question, table, nullptr, beam_limit, cap);
    ParserOutput out;
    out.answer = parse(set, question, table).answer;
    for (const auto& c : set.candidates) {
      if (c.denotation) out.candidates.push_back(*c.denotation);
    }
    return out;
  };
}

UpperBoundResult question_rewrite_upper_bound(const CorpusSplit& corpus, const TableParser& parser,
                                              const ReferentialLexicon& lexicon) {
  UpperBoundResult r;
  size_t base_hits = 0, ub_hits = 0;
  for (const auto& seq : corpus.sequences) {
    const Table& table = corpus.table_for(seq);
    for (size_t k = 0; k < seq.entries.size(); ++k) {
      const auto& e = seq.entries[k];
      const std::vector<std::string> variants =
          k == 0 ? std::vector<std::string>{e.text} : rewrite_question_variants(e.text, seq.entries[k - 1].text, lexicon);
      if (variants.size() > 1) ++r.n_with_variants;
      bool base_ok = false, any_ok = false;
      for (size_t v = 0; v < variants.size() && !any_ok; ++v) {
        const bool ok = parser(variants[v], table).answer == e.gold;
        if (v == 0) base_ok = ok;
        any_ok = any_ok || ok;
      }
      base_hits += base_ok ? 1 : 0;
      ub_hits += any_ok ? 1 : 0;
      ++r.n_questions;
    }
  }
  if (r.n_questions > 0) {
    r.baseline_accuracy = static_cast<double>(base_hits) / static_cast<double>(r.n_questions);
    r.upper_bound_accuracy = static_cast<double>(ub_hits) / static_cast<double>(r.n_questions);
  }
  r.delta = r.upper_bound_accuracy - r.baseline_accuracy;
  return r;
}

AnswerCoordinates RewrittenTable::to_original(const AnswerCoordinates& coords) const {
  AnswerCoordinates out;
  for (const Coord& c : coords) {
    if (c.row < 0 || c.row >= static_cast<int>(row_map.size())) {
      throw ValidationError("row " + std::to_string(c.row) + " outside the rewritten table of " +
                            std::to_string(row_map.size()) + " rows");
    }
    out.insert({row_map[static_cast<size_t>(c.row)], c.col});
  }
  return out;
}

RewrittenTable rewrite_table(const Table& table, const AnswerCoordinates& previous) {
  if (previous.empty()) throw ValidationError("rewrite_table: previous answer is empty");
  table.check_bounds(previous);
  RewrittenTable out;
  for (int r : previous.rows()) out.row_map.push_back(r);
  out.table = table.select_rows(out.row_map);
  return out;
}

std::string to_string(RewritePolicy policy) {
  switch (policy) {
    case RewritePolicy::kNever: return "never";
    case RewritePolicy::kAlways: return "always";
    case RewritePolicy::kRowSubset: return "row_subset";
    case RewritePolicy::kReference: return "reference";
    case RewritePolicy::kUpperBound: return "upper_bound";
  }
  return "never";
}

RewritePolicy rewrite_policy_from_string(const std::string& s) {
  std::string k = text::to_lower_ascii(s);
  std::replace(k.begin(), k.end(), '-', '_');
  for (RewritePolicy p : kAllPolicies) {
    if (to_string(p) == k) return p;
  }
  throw std::invalid_argument("unknown rewrite policy '" + s + "'");
}

bool requires_gold(RewritePolicy policy) {
  return policy == RewritePolicy::kReference || policy == RewritePolicy::kUpperBound;
}

bool policy_rewrites(RewritePolicy policy, const std::string& question, const AnswerCoordinates* gold,
                     const AnswerCoordinates* gold_prev, const AnswerCoordinates& predicted_prev, const Table& table,
                     const ReferentialLexicon& lexicon) {
  if (policy == RewritePolicy::kNever) return false;
  if (policy == RewritePolicy::kAlways) return true;
  bool applicable;
  if (gold != nullptr && gold_prev != nullptr) {
    const QuestionClass qc = classify_question(*gold, gold_prev, table);
    applicable = qc == QuestionClass::kSelectSubset || qc == QuestionClass::kSelectRow;
  } else {
    if (requires_gold(policy)) throw std::invalid_argument("policy " + to_string(policy) + " needs gold answers");
    applicable = lexicon.matches(question);
  }
  if (!applicable) return false;
  if (policy == RewritePolicy::kReference) return predicted_prev == *gold_prev;
  return true;
}

PolicyResult run_policy(const CorpusSplit& corpus, const TableParser& parser, RewritePolicy policy, bool gold_available,
                        const ReferentialLexicon& lexicon) {
  if (requires_gold(policy) && !gold_available) {
    throw std::invalid_argument("policy " + to_string(policy) + " needs gold answers");
  }
  PolicyResult r;
  r.policy = policy;
  const size_t n_seq = corpus.sequences.size();
  r.predictions.resize(n_seq);
  r.rewritten.resize(n_seq);
  std::vector<std::vector<bool>> oracle_hit(n_seq);

#pragma omp parallel for schedule(dynamic)
  for (long si = 0; si < static_cast<long>(n_seq); ++si) {
    const auto s = static_cast<size_t>(si);
    const QuestionSequence& seq = corpus.sequences[s];
    const Table& table = corpus.table_for(seq);
    for (size_t k = 0; k < seq.entries.size(); ++k) {
      const QuestionEntry& e = seq.entries[k];
      bool rewrite = false;
      if (k > 0) {
        const AnswerCoordinates* gold = gold_available ? &e.gold : nullptr;
        const AnswerCoordinates* gold_prev = gold_available ? &seq.entries[k - 1].gold : nullptr;
        rewrite = policy_rewrites(policy, e.text, gold, gold_prev, r.predictions[s][k - 1], table, lexicon);
      }
      ParserOutput out;
      if (rewrite) {
        const AnswerCoordinates& basis =
            policy == RewritePolicy::kUpperBound ? seq.entries[k - 1].gold : r.predictions[s][k - 1];
        const RewrittenTable rt = rewrite_table(table, basis);
        out = parser(e.text, rt.table);
        out.answer = rt.to_original(out.answer);
        for (auto& c : out.candidates) c = rt.to_original(c);
      } else {
        out = parser(e.text, table);
      }
      bool hit = false;
      for (const auto& c : out.candidates) hit = hit || c == e.gold;
      oracle_hit[s].push_back(hit);
      r.rewritten[s].push_back(rewrite);
      r.predictions[s].push_back(std::move(out.answer));
    }
  }

  std::array<size_t, kPositionBuckets> counts{}, correct{}, oracle{};
  size_t total_correct = 0, total_oracle = 0;
  for (size_t s = 0; s < n_seq; ++s) {
    const auto& seq = corpus.sequences[s];
    for (size_t k = 0; k < seq.entries.size(); ++k) {
      const auto b = static_cast<size_t>(position_bucket(seq.entries[k].position));
      const bool ok = r.predictions[s][k] == seq.entries[k].gold;
      ++counts[b];
      correct[b] += ok ? 1 : 0;
      oracle[b] += oracle_hit[s][k] ? 1 : 0;
      total_correct += ok ? 1 : 0;
      total_oracle += oracle_hit[s][k] ? 1 : 0;
      r.n_rewritten += r.rewritten[s][k] ? 1 : 0;
      ++r.n_questions;
    }
  }
  if (r.n_questions > 0) {
    r.accuracy = static_cast<double>(total_correct) / static_cast<double>(r.n_questions);
    r.oracle = static_cast<double>(total_oracle) / static_cast<double>(r.n_questions);
  }
  for (size_t b = 0; b < kPositionBuckets; ++b) {
    if (counts[b] > 0) {
      r.per_position[b] = static_cast<double>(correct[b]) / static_cast<double>(counts[b]);
      r.per_position_oracle[b] = static_cast<double>(oracle[b]) / static_cast<double>(counts[b]);
    }
  }
  return r;
}

nlohmann::json to_json(const PolicyResult& r) {
  nlohmann::json per_position = nlohmann::json::array();
  for (size_t b = 0; b < kPositionBuckets; ++b) {
    per_position.push_back({{"position", b + 1 == kPositionBuckets ? std::to_string(b + 1) + "+" : std::to_string(b + 1)},
                            {"accuracy", r.per_position[b]},
                            {"oracle", r.per_position_oracle[b]}});
  }
  return {{"policy", to_string(r.policy)},
          {"accuracy", r.accuracy},
          {"oracle", r.oracle},
          {"per_position", per_position},
          {"n_questions", r.n_questions},
          {"n_rewritten", r.n_rewritten}};
}

}  // namespace seqtab
