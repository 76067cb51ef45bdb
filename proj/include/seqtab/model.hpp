#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "seqtab/encoder.hpp"

namespace seqtab {

template <typename T>
struct ModuleOutputs {
  Var<T> m_col;   // c, softmax
  Var<T> m_row;   // r, sigmoid
  Var<T> m_cell;  // (r*c) x 1, sigmoid
};

// m_col = softmax(h W5 q), m_row = sigmoid((sum_j t_ij) W6 q),
// m_cell = sigmoid(t W7 q). q is 1 x d.
template <typename T>
ModuleOutputs<T> run_modules(Var<T> q, const EncodedTable<T>& encoded, const ModelVars<T>& vars);

// softmax(W8 q), a 3-vector over {column, row, cell}.
template <typename T>
Var<T> module_attention(Var<T> q, const ModelVars<T>& vars);

// a_ij = m_att[0] m_col_j + m_att[1] m_row_i + m_att[2] m_cell_ij, as r x c.
template <typename T>
Var<T> mix_scores(const ModuleOutputs<T>& modules, Var<T> m_att, int rows, int cols);

// Cells scoring above 0.5, or the row-major first maximum if none does.
template <typename T>
AnswerCoordinates predict(const Array<T>& scores);

// Mean binary cross-entropy over all cells, gold cells as positives.
template <typename T>
Var<T> answer_loss(Var<T> scores, const AnswerCoordinates& gold);

struct AttentionSummary {
  std::array<double, 3> m_att{};
  std::vector<double> m_col;
};

template <typename T>
struct StepResult {
  Array<T> scores;  // r x c
  AnswerCoordinates predicted;
  AttentionSummary attention;
};

// Recurrent state across the questions of one sequence.
template <typename T>
struct SequenceState {
  Var<T> h;
  Var<T> c;
  bool started = false;
};

template <typename T>
struct StepNodes {
  ModuleOutputs<T> modules;
  Var<T> m_att;
  Var<T> scores;
};

// Feeds the question to the sequence LSTM and returns q' = q + h_k.
template <typename T>
Var<T> advance_question(const std::string& question, SequenceState<T>& state, const ModelVars<T>& vars,
                        const ModelParams<T>& params);

// Conditioning, modules and mix for an already advanced question vector.
template <typename T>
StepNodes<T> score_question(Var<T> q_aug, const EncodedTable<T>& base, const Array<T>& p1, const ModelVars<T>& vars);

// One question: q' = q + h_k with h_k from the sequence LSTM, then
// conditioning on p1, the modules and the mix. base is encode_table output.
template <typename T>
StepNodes<T> answer_step(const std::string& question, const EncodedTable<T>& base, const Array<T>& p1,
                         SequenceState<T>& state, const ModelVars<T>& vars, const ModelParams<T>& params);

// Answers questions in order. p1 at step k is the gold answer of step k-1
// when teacher forcing is on (golds must then be given), otherwise the
// prediction of step k-1; step 1 uses zeros.
template <typename T>
std::vector<StepResult<T>> answer_sequence(const std::vector<std::string>& questions, const Table& table,
                                           ModelParams<T>& params, bool teacher_forcing,
                                           const std::vector<AnswerCoordinates>* golds = nullptr);

template <typename T>
std::vector<StepResult<T>> answer_sequence(const QuestionSequence& seq, const Table& table, ModelParams<T>& params,
                                           bool teacher_forcing);

// Mean per-question loss of a sequence, built on g. Without teacher forcing
// p1 comes from the previous step's prediction.
template <typename T>
Var<T> sequence_loss(Graph<T>& g, const QuestionSequence& seq, const Table& table, ModelParams<T>& params,
                     bool teacher_forcing = true);

// Predictions for a whole corpus, in corpus order (teacher forcing off).
std::vector<std::vector<AnswerCoordinates>> predict_corpus(const CorpusSplit& corpus, ModelParams<float>& params);

}  // namespace seqtab
