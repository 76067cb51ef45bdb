#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqtab/checkpoint.hpp"
#include "seqtab/corpus_io.hpp"
#include "seqtab/graph.hpp"
#include "seqtab/lstm.hpp"
#include "seqtab/table.hpp"

namespace seqtab {

// Codepoint vocabulary. Text is whitespace-normalized and ASCII-lowercased
// before lookup; an empty string encodes as the single empty-cell id.
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;
  static constexpr int kEmpty = 1;

  Vocabulary() = default;
  explicit Vocabulary(std::vector<char32_t> codepoints);

  static Vocabulary from_texts(const std::vector<std::string>& texts);
  static Vocabulary from_corpus(const CorpusSplit& corpus);

  int size() const { return static_cast<int>(codepoints_.size()) + 2; }
  int id(char32_t cp) const;
  // At most max_chars ids; never empty.
  std::vector<int> encode(std::string_view text, int max_chars) const;
  const std::vector<char32_t>& codepoints() const { return codepoints_; }

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<char32_t> codepoints_;  // sorted; id = index + 2
};

struct ModelConfig {
  int d = 256;
  int char_dim = 100;
  int max_chars = 64;
  double init_scale = 0.08;
  uint64_t seed = 1;
};

template <typename T>
struct ModelParams {
  ModelConfig config;
  Vocabulary vocab;
  Parameter<T> embedding;   // |vocab| x char_dim
  LstmParams<T> lstm;       // shared by question, headers and cells
  LstmParams<T> seq_lstm;   // over the question sequence, d -> d
  Parameter<T> w1;          // d x d, typed cells
  Parameter<T> w3;          // 1 x 1, weight on previous-answer indicators
  Parameter<T> w4;          // 1 x d, question relevance of previous answers
  Parameter<T> w5, w6, w7;  // d x d, column / row / cell modules
  Parameter<T> w8;          // 3 x d, module mix

  // Shapes from config and vocabulary, values drawn uniformly in
  // [-init_scale, init_scale] from config.seed; LSTM initial states are zero.
  static ModelParams create(const ModelConfig& config, const Vocabulary& vocab);

  std::vector<Parameter<T>*> list();
  std::vector<CheckpointRecord> to_records() const;
  // Throws CheckpointError on a missing record or shape mismatch.
  static ModelParams from_records(const std::vector<CheckpointRecord>& records);

  void save(const std::filesystem::path& path) const { write_checkpoint(path, to_records()); }
  static ModelParams load(const std::filesystem::path& path) { return from_records(read_checkpoint(path)); }
};

template <typename T>
struct ModelVars {
  Var<T> embedding;
  LstmVars<T> lstm;
  LstmVars<T> seq_lstm;
  Var<T> w1, w3, w4, w5, w6, w7, w8;
};

template <typename T>
ModelVars<T> bind(Graph<T>& g, ModelParams<T>& params);

// Cell tensors are stored as (r*c) x d with cell (i, j) at row i*c + j.
template <typename T>
struct EncodedTable {
  int rows = 0;
  int cols = 0;
  Var<T> h;   // c x d
  Var<T> t1;  // (r*c) x d, raw cells
  Var<T> t;   // (r*c) x d, typed (and, after conditioning, scaled)
};

// q as a 1 x d row.
template <typename T>
Var<T> encode_question(const std::string& text, const ModelVars<T>& vars, const ModelParams<T>& params);

template <typename T>
EncodedTable<T> encode_table(const Table& table, const ModelVars<T>& vars, const ModelParams<T>& params);

// r x c indicator matrix of the given coordinates.
template <typename T>
Array<T> answer_indicators(const AnswerCoordinates& coords, int rows, int cols);

// p = ReLU(W3 p1 + W4 q) per cell, t <- t + p * t. p1 is r x c.
template <typename T>
EncodedTable<T> condition_on_previous(const EncodedTable<T>& encoded, Var<T> q, const Array<T>& p1,
                                      const ModelVars<T>& vars);

// The relevance gate p (r*c x 1) used by condition_on_previous.
template <typename T>
Var<T> previous_relevance(Var<T> q, const Array<T>& p1, const ModelVars<T>& vars);

}  // namespace seqtab
