#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqtab/logical_form.hpp"
#include "seqtab/table.hpp"

namespace seqtab {

inline constexpr size_t kDefaultBeam = 50;

struct Candidate {
  LogicalForm form;
  double score = 0;
  std::optional<AnswerCoordinates> denotation;  // nullopt: empty denotation
};

struct CandidateSet {
  std::vector<Candidate> candidates;  // sorted best first
  size_t beam_limit = kDefaultBeam;
  std::optional<size_t> denotation_size_cap;
};

// Lowercased tokens with a crude plural strip ("teams" -> "team",
// "countries" -> "country"); numbers are kept verbatim.
std::vector<std::string> match_tokens(std::string_view s);

// Decimal numbers written in the question ("5", "1,200", "3.5").
std::vector<std::string> question_numbers(std::string_view question);

struct ScoringCues {
  bool wants_max = false;      // most, highest
  bool wants_min = false;      // least, lowest
  bool wants_greater = false;  // more, greater, over, above, after
  bool wants_less = false;     // less, fewer, under, below, before
  bool referential = false;    // them, those, ...
};
ScoringCues scoring_cues(std::string_view question);

// Token-overlap similarity plus keyword cues; see generate_candidates.
double score_form(const LogicalForm& form, const Table& table, const std::set<std::string>& question_tokens,
                  const ScoringCues& cues);

// Every well-typed form over the table, scored and trimmed to the beam.
// Candidates whose denotation exceeds denotation_size_cap are dropped.
CandidateSet generate_candidates(const std::string& question, const Table& table,
                                 const AnswerCoordinates* previous, size_t beam_limit = kDefaultBeam,
                                 std::optional<size_t> denotation_size_cap = std::nullopt);

struct ParseResult {
  AnswerCoordinates answer;
  LogicalForm form;
};

// Executes the best candidate, falling through empty denotations; if every
// candidate is empty the best-scored column selection answers.
ParseResult parse(const std::string& question, const Table& table, const AnswerCoordinates* previous,
                  size_t beam_limit = kDefaultBeam, std::optional<size_t> denotation_size_cap = std::nullopt);
ParseResult parse(const CandidateSet& candidates, const std::string& question, const Table& table);

AnswerCoordinates parse_and_answer(const std::string& question, const Table& table,
                                   const AnswerCoordinates* previous);

}  // namespace seqtab
