#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqtab/corpus_io.hpp"
#include "seqtab/evaluation.hpp"
#include "seqtab/lexicon.hpp"
#include "seqtab/parser.hpp"

namespace seqtab {

// Candidate noun phrases of a question: maximal runs of non-stopword tokens,
// longer runs become every 4-token window. Distinct, in order of appearance.
std::vector<std::string> candidate_noun_phrases(std::string_view question);

// Variant 0 is current itself; then one variant per (expression found in
// current, noun phrase of previous), replacing the first occurrence of the
// expression.
std::vector<std::string> rewrite_question_variants(const std::string& current, const std::string& previous,
                                                   const ReferentialLexicon& lexicon = {});

struct ParserOutput {
  AnswerCoordinates answer;
  std::vector<AnswerCoordinates> candidates;  // non-empty candidate denotations
};

// A context-free question answerer over a (possibly rewritten) table.
using TableParser = std::function<ParserOutput(const std::string& question, const Table& table)>;

TableParser primitive_parser(size_t beam_limit = kDefaultBeam, std::optional<size_t> denotation_size_cap = std::nullopt);

struct UpperBoundResult {
  double baseline_accuracy = 0;  // variant 0 only
  double upper_bound_accuracy = 0;
  double delta = 0;
  size_t n_questions = 0;
  size_t n_with_variants = 0;
};

// Counts a question correct if any variant is answered correctly.
UpperBoundResult question_rewrite_upper_bound(const CorpusSplit& corpus, const TableParser& parser,
                                              const ReferentialLexicon& lexicon = {});

struct RewrittenTable {
  Table table;
  std::vector<int> row_map;  // rewritten row -> original row

  AnswerCoordinates to_original(const AnswerCoordinates& coords) const;
  std::vector<int> retained_rows() const { return row_map; }
};

// Keeps the rows of previous in original order. Throws ValidationError when
// previous is empty or out of bounds.
RewrittenTable rewrite_table(const Table& table, const AnswerCoordinates& previous);

enum class RewritePolicy { kNever, kAlways, kRowSubset, kReference, kUpperBound };
inline constexpr std::array<RewritePolicy, 5> kAllPolicies = {RewritePolicy::kNever, RewritePolicy::kAlways,
                                                              RewritePolicy::kRowSubset, RewritePolicy::kReference,
                                                              RewritePolicy::kUpperBound};

std::string to_string(RewritePolicy policy);
RewritePolicy rewrite_policy_from_string(const std::string& s);
bool requires_gold(RewritePolicy policy);

struct PolicyResult {
  RewritePolicy policy = RewritePolicy::kNever;
  double accuracy = 0;
  double oracle = 0;
  std::array<double, kPositionBuckets> per_position{};
  std::array<double, kPositionBuckets> per_position_oracle{};
  size_t n_questions = 0;
  size_t n_rewritten = 0;
  // Per sequence and question, in the original table frame.
  std::vector<std::vector<AnswerCoordinates>> predictions;
  std::vector<std::vector<bool>> rewritten;
};

// Whether the policy rewrites question k given the previous prediction.
// gold and gold_prev may be null when gold is unavailable; then ROW_SUBSET
// falls back to detecting a referential expression in the question.
bool policy_rewrites(RewritePolicy policy, const std::string& question, const AnswerCoordinates* gold,
                     const AnswerCoordinates* gold_prev, const AnswerCoordinates& predicted_prev, const Table& table,
                     const ReferentialLexicon& lexicon = {});

// Throws std::invalid_argument for REFERENCE or UPPER_BOUND without gold.
PolicyResult run_policy(const CorpusSplit& corpus, const TableParser& parser, RewritePolicy policy,
                        bool gold_available = true, const ReferentialLexicon& lexicon = {});

nlohmann::json to_json(const PolicyResult& result);

}  // namespace seqtab
