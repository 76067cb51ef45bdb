#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "seqtab/corpus_io.hpp"
#include "seqtab/parser.hpp"

namespace seqtab {

inline constexpr int kPositionBuckets = 4;  // the last bucket pools positions >= 4

struct EvalReport {
  double overall_accuracy = 0;
  std::array<double, kPositionBuckets> per_position{};
  std::array<size_t, kPositionBuckets> position_counts{};
  double sequence_accuracy = 0;  // every question of the sequence correct
  size_t n_questions = 0;
  size_t n_sequences = 0;
};

// Keyed by (sequence key, position).
using PredictionMap = std::map<std::pair<std::string, int>, AnswerCoordinates>;

int position_bucket(int position);

// Exact coordinate-set match per question. Throws std::invalid_argument
// naming the first question without a prediction.
EvalReport score(const PredictionMap& predictions, const CorpusSplit& gold);
// predictions[s][k] answers question k of sequence s in corpus order.
EvalReport score(const std::vector<std::vector<AnswerCoordinates>>& predictions, const CorpusSplit& gold);

PredictionMap to_prediction_map(const std::vector<std::vector<AnswerCoordinates>>& predictions,
                                const CorpusSplit& corpus);

// Fraction of questions where some candidate denotation equals the gold.
double oracle_score(const std::vector<std::vector<AnswerCoordinates>>& candidate_denotations,
                    const std::vector<AnswerCoordinates>& gold);
double oracle_score(const std::vector<CandidateSet>& candidate_sets, const std::vector<AnswerCoordinates>& gold);

nlohmann::json to_json(const EvalReport& report);
// Two columns, metric and value, one metric per line.
std::string format_report_tsv(const EvalReport& report);

// Prediction dump: sequence_id, position, answer_coordinates, correct.
std::string format_predictions_tsv(const PredictionMap& predictions, const CorpusSplit& gold);
PredictionMap parse_predictions_tsv(const std::string& content);
PredictionMap load_predictions(const std::filesystem::path& path);

}  // namespace seqtab
