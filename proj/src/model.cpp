#include "seqtab/model.hpp"

namespace seqtab {

template <typename T>
ModuleOutputs<T> run_modules(Var<T> q, const EncodedTable<T>& encoded, const ModelVars<T>& vars) {
  const int d = vars.w5.value().dim(0);
  if (q.size() != static_cast<size_t>(d)) {
    throw ShapeError("run_modules: question vector " + shape_str(q.shape()) + " for d=" + std::to_string(d));
  }
  const int r = encoded.rows, c = encoded.cols;
  Var<T> qcol = ad::reshape(q, {d, 1});
  ModuleOutputs<T> m;
  m.m_col = ad::softmax(ad::reshape(ad::matmul(encoded.h, ad::matmul(vars.w5, qcol)), {c}), 0);
  Var<T> row_sums = ad::sum(ad::reshape(encoded.t, {r, c, d}), 1);
  m.m_row = ad::sigmoid(ad::reshape(ad::matmul(row_sums, ad::matmul(vars.w6, qcol)), {r}));
  m.m_cell = ad::sigmoid(ad::matmul(encoded.t, ad::matmul(vars.w7, qcol)));
  return m;
}

template <typename T>
Var<T> module_attention(Var<T> q, const ModelVars<T>& vars) {
  const int d = vars.w8.value().dim(1);
  return ad::softmax(ad::reshape(ad::matmul(vars.w8, ad::reshape(q, {d, 1})), {3}), 0);
}

template <typename T>
Var<T> mix_scores(const ModuleOutputs<T>& modules, Var<T> m_att, int rows, int cols) {
  Graph<T>& g = *m_att.graph;
  if (modules.m_col.size() != static_cast<size_t>(cols) || modules.m_row.size() != static_cast<size_t>(rows) ||
      modules.m_cell.size() != static_cast<size_t>(rows) * cols || m_att.size() != 3) {
    throw ShapeError("mix_scores: module shapes m_col " + shape_str(modules.m_col.shape()) + ", m_row " +
                     shape_str(modules.m_row.shape()) + ", m_cell " + shape_str(modules.m_cell.shape()) +
                     ", m_att " + shape_str(m_att.shape()));
  }
  Var<T> ones = g.constant(Array<T>({rows, cols}, T(1)));
  Var<T> col_part = ad::reshape(ad::mul(ones, ad::reshape(modules.m_col, {cols})), {rows * cols, 1});
  Var<T> row_part = ad::reshape(ad::mul_rows(ones, modules.m_row), {rows * cols, 1});
  Var<T> cell_part = ad::reshape(modules.m_cell, {rows * cols, 1});
  Var<T> stacked = ad::concat<T>({col_part, row_part, cell_part}, 1);
  return ad::reshape(ad::matmul(stacked, ad::reshape(m_att, {3, 1})), {rows, cols});
}

template <typename T>
AnswerCoordinates predict(const Array<T>& scores) {
  if (scores.rank() != 2 || scores.empty()) throw ShapeError("predict: scores must be a non-empty r x c array");
  const int rows = scores.dim(0), cols = scores.dim(1);
  AnswerCoordinates out;
  Coord best{0, 0};
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (scores.at(i, j) > T(0.5)) out.insert({i, j});
      if (scores.at(i, j) > scores.at(best.row, best.col)) best = {i, j};
    }
  }
  if (out.empty()) out.insert(best);
  return out;
}

template <typename T>
Var<T> answer_loss(Var<T> scores, const AnswerCoordinates& gold) {
  const Shape& s = scores.shape();
  if (s.size() != 2) throw ShapeError("answer_loss: scores must be r x c, got " + shape_str(s));
  return ad::bce_mean(scores, answer_indicators<T>(gold, s[0], s[1]));
}

template <typename T>
Var<T> advance_question(const std::string& question, SequenceState<T>& state, const ModelVars<T>& vars,
                        const ModelParams<T>& params) {
  Var<T> q = encode_question(question, vars, params);
  if (!state.started) {
    state.h = vars.seq_lstm.h0;
    state.c = vars.seq_lstm.c0;
    state.started = true;
  }
  std::tie(state.h, state.c) = lstm_cell(q, state.h, state.c, vars.seq_lstm);
  return ad::add(q, state.h);
}

template <typename T>
StepNodes<T> score_question(Var<T> q_aug, const EncodedTable<T>& base, const Array<T>& p1, const ModelVars<T>& vars) {
  EncodedTable<T> conditioned = condition_on_previous(base, q_aug, p1, vars);
  StepNodes<T> out;
  out.modules = run_modules(q_aug, conditioned, vars);
  out.m_att = module_attention(q_aug, vars);
  out.scores = mix_scores(out.modules, out.m_att, base.rows, base.cols);
  return out;
}

template <typename T>
StepNodes<T> answer_step(const std::string& question, const EncodedTable<T>& base, const Array<T>& p1,
                         SequenceState<T>& state, const ModelVars<T>& vars, const ModelParams<T>& params) {
  return score_question(advance_question(question, state, vars, params), base, p1, vars);
}

template <typename T>
std::vector<StepResult<T>> answer_sequence(const std::vector<std::string>& questions, const Table& table,
                                           ModelParams<T>& params, bool teacher_forcing,
                                           const std::vector<AnswerCoordinates>* golds) {
  if (teacher_forcing && (golds == nullptr || golds->size() < questions.size())) {
    throw std::invalid_argument("answer_sequence: teacher forcing needs a gold answer per question");
  }
  Graph<T> g;
  ModelVars<T> vars = bind(g, params);
  EncodedTable<T> base = encode_table(table, vars, params);
  SequenceState<T> state;
  Array<T> p1({table.rows(), table.cols()});
  std::vector<StepResult<T>> out;
  for (size_t k = 0; k < questions.size(); ++k) {
    StepNodes<T> nodes = answer_step(questions[k], base, p1, state, vars, params);
    StepResult<T> step;
    step.scores = nodes.scores.value();
    step.predicted = predict(step.scores);
    for (int i = 0; i < 3; ++i) step.attention.m_att[static_cast<size_t>(i)] = nodes.m_att.value()[static_cast<size_t>(i)];
    for (T v : nodes.modules.m_col.value().values()) step.attention.m_col.push_back(static_cast<double>(v));
    p1 = answer_indicators<T>(teacher_forcing ? (*golds)[k] : step.predicted, table.rows(), table.cols());
    out.push_back(std::move(step));
  }
  return out;
}

template <typename T>
std::vector<StepResult<T>> answer_sequence(const QuestionSequence& seq, const Table& table, ModelParams<T>& params,
                                           bool teacher_forcing) {
  std::vector<std::string> questions;
  std::vector<AnswerCoordinates> golds;
  for (const auto& e : seq.entries) {
    questions.push_back(e.text);
    golds.push_back(e.gold);
  }
  return answer_sequence(questions, table, params, teacher_forcing, &golds);
}

template <typename T>
Var<T> sequence_loss(Graph<T>& g, const QuestionSequence& seq, const Table& table, ModelParams<T>& params,
                     bool teacher_forcing) {
  if (seq.entries.empty()) throw std::invalid_argument("sequence_loss: empty sequence " + seq.key());
  ModelVars<T> vars = bind(g, params);
  EncodedTable<T> base = encode_table(table, vars, params);
  SequenceState<T> state;
  Array<T> p1({table.rows(), table.cols()});
  std::vector<Var<T>> losses;
  for (const auto& e : seq.entries) {
    StepNodes<T> nodes = answer_step(e.text, base, p1, state, vars, params);
    losses.push_back(answer_loss(nodes.scores, e.gold));
    p1 = answer_indicators<T>(teacher_forcing ? e.gold : predict(nodes.scores.value()), table.rows(), table.cols());
  }
  const int n = static_cast<int>(losses.size());
  Var<T> weights = g.constant(Array<T>({n}, T(1) / static_cast<T>(n)));
  return ad::sum_all(ad::mul(ad::concat(losses, 0), weights));
}

std::vector<std::vector<AnswerCoordinates>> predict_corpus(const CorpusSplit& corpus, ModelParams<float>& params) {
  std::vector<std::vector<AnswerCoordinates>> out(corpus.sequences.size());
  const long n = static_cast<long>(corpus.sequences.size());
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < n; ++s) {
    const QuestionSequence& seq = corpus.sequences[static_cast<size_t>(s)];
    for (auto& step : answer_sequence(seq, corpus.table_for(seq), params, false)) {
      out[static_cast<size_t>(s)].push_back(std::move(step.predicted));
    }
  }
  return out;
}

#define SEQTAB_INSTANTIATE_MODEL(T)                                                                               \
  template ModuleOutputs<T> run_modules<T>(Var<T>, const EncodedTable<T>&, const ModelVars<T>&);                  \
  template Var<T> module_attention<T>(Var<T>, const ModelVars<T>&);                                               \
  template Var<T> mix_scores<T>(const ModuleOutputs<T>&, Var<T>, int, int);                                       \
  template AnswerCoordinates predict<T>(const Array<T>&);                                                         \
  template Var<T> answer_loss<T>(Var<T>, const AnswerCoordinates&);                                               \
  template Var<T> advance_question<T>(const std::string&, SequenceState<T>&, const ModelVars<T>&,                  \
                                      const ModelParams<T>&);                                                     \
  template StepNodes<T> score_question<T>(Var<T>, const EncodedTable<T>&, const Array<T>&, const ModelVars<T>&);   \
  template StepNodes<T> answer_step<T>(const std::string&, const EncodedTable<T>&, const Array<T>&,               \
                                       SequenceState<T>&, const ModelVars<T>&, const ModelParams<T>&);            \
  template std::vector<StepResult<T>> answer_sequence<T>(const std::vector<std::string>&, const Table&,           \
                                                         ModelParams<T>&, bool, const std::vector<AnswerCoordinates>*); \
  template std::vector<StepResult<T>> answer_sequence<T>(const QuestionSequence&, const Table&, ModelParams<T>&, \
                                                         bool);                                                   \
  template Var<T> sequence_loss<T>(Graph<T>&, const QuestionSequence&, const Table&, ModelParams<T>&, bool);

SEQTAB_INSTANTIATE_MODEL(float)
SEQTAB_INSTANTIATE_MODEL(double)

}  // namespace seqtab
