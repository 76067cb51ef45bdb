#include "seqtab/encoder.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "seqtab/text.hpp"

namespace seqtab {

Vocabulary::Vocabulary(std::vector<char32_t> codepoints) : codepoints_(std::move(codepoints)) {
  std::sort(codepoints_.begin(), codepoints_.end());
  codepoints_.erase(std::unique(codepoints_.begin(), codepoints_.end()), codepoints_.end());
}

Vocabulary Vocabulary::from_texts(const std::vector<std::string>& texts) {
  std::set<char32_t> seen;
  for (const auto& t : texts) {
    for (char32_t cp : text::utf8_codepoints(text::to_lower_ascii(text::normalize_ws(t)))) seen.insert(cp);
  }
  return Vocabulary(std::vector<char32_t>(seen.begin(), seen.end()));
}

Vocabulary Vocabulary::from_corpus(const CorpusSplit& corpus) {
  std::vector<std::string> texts;
  for (const auto& seq : corpus.sequences) {
    for (const auto& e : seq.entries) texts.push_back(e.text);
  }
  for (const auto& [id, table] : corpus.tables) {
    for (const auto& h : table.headers()) texts.push_back(h);
    for (const auto& row : table.cells()) texts.insert(texts.end(), row.begin(), row.end());
  }
  return from_texts(texts);
}

int Vocabulary::id(char32_t cp) const {
  auto it = std::lower_bound(codepoints_.begin(), codepoints_.end(), cp);
  if (it == codepoints_.end() || *it != cp) return kUnknown;
  return static_cast<int>(it - codepoints_.begin()) + 2;
}

std::vector<int> Vocabulary::encode(std::string_view s, int max_chars) const {
  const auto cps = text::utf8_codepoints(text::to_lower_ascii(text::normalize_ws(s)));
  if (cps.empty() || max_chars <= 0) return {kEmpty};
  std::vector<int> ids;
  for (size_t i = 0; i < cps.size() && static_cast<int>(i) < max_chars; ++i) ids.push_back(id(cps[i]));
  return ids;
}

template <typename T>
ModelParams<T> ModelParams<T>::create(const ModelConfig& config, const Vocabulary& vocab) {
  if (config.d < 1 || config.char_dim < 1 || config.max_chars < 1) {
    throw ShapeError("model dimensions must be positive: d=" + std::to_string(config.d) +
                     ", char_dim=" + std::to_string(config.char_dim) + ", max_chars=" + std::to_string(config.max_chars));
  }
  const int d = config.d;
  ModelParams p;
  p.config = config;
  p.vocab = vocab;
  p.embedding = Parameter<T>("embedding", Array<T>({vocab.size(), config.char_dim}));
  p.lstm = LstmParams<T>("lstm", config.char_dim, d);
  p.seq_lstm = LstmParams<T>("seq_lstm", d, d);
  p.w1 = Parameter<T>("W1", Array<T>({d, d}));
  p.w3 = Parameter<T>("W3", Array<T>({1, 1}));
  p.w4 = Parameter<T>("W4", Array<T>({1, d}));
  p.w5 = Parameter<T>("W5", Array<T>({d, d}));
  p.w6 = Parameter<T>("W6", Array<T>({d, d}));
  p.w7 = Parameter<T>("W7", Array<T>({d, d}));
  p.w8 = Parameter<T>("W8", Array<T>({3, d}));
  UniformInit init(config.seed);
  const double s = config.init_scale;
  init.fill(p.embedding.value, s);
  p.lstm.init(init, s);
  p.seq_lstm.init(init, s);
  for (auto* w : {&p.w1, &p.w3, &p.w4, &p.w5, &p.w6, &p.w7, &p.w8}) init.fill(w->value, s);
  return p;
}

template <typename T>
std::vector<Parameter<T>*> ModelParams<T>::list() {
  std::vector<Parameter<T>*> out = {&embedding};
  for (auto* q : lstm.list()) out.push_back(q);
  for (auto* q : seq_lstm.list()) out.push_back(q);
  for (auto* w : {&w1, &w3, &w4, &w5, &w6, &w7, &w8}) out.push_back(w);
  return out;
}

template <typename T>
std::vector<CheckpointRecord> ModelParams<T>::to_records() const {
  std::vector<CheckpointRecord> out;
  out.push_back({"model.config", Array<float>({3}, std::vector<float>{static_cast<float>(config.d),
                                                                      static_cast<float>(config.char_dim),
                                                                      static_cast<float>(config.max_chars)})});
  std::vector<float> cps;
  for (char32_t cp : vocab.codepoints()) cps.push_back(static_cast<float>(cp));
  const int n_cps = static_cast<int>(cps.size());
  out.push_back({"vocab.codepoints", Array<float>({n_cps}, std::move(cps))});
  auto* self = const_cast<ModelParams*>(this);
  for (const auto* p : self->list()) out.push_back({p->name, p->value.template cast<float>()});
  return out;
}

template <typename T>
ModelParams<T> ModelParams<T>::from_records(const std::vector<CheckpointRecord>& records) {
  std::map<std::string, const Array<float>*> by_name;
  for (const auto& r : records) by_name[r.name] = &r.value;
  auto get = [&](const std::string& name) -> const Array<float>& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw CheckpointError("checkpoint lacks record " + name);
    return *it->second;
  };
  const Array<float>& cfg = get("model.config");
  if (cfg.size() != 3) throw CheckpointError("model.config record has " + std::to_string(cfg.size()) + " values");
  ModelConfig config;
  config.d = static_cast<int>(cfg[0]);
  config.char_dim = static_cast<int>(cfg[1]);
  config.max_chars = static_cast<int>(cfg[2]);
  std::vector<char32_t> cps;
  for (float f : get("vocab.codepoints").values()) cps.push_back(static_cast<char32_t>(f));
  ModelParams p = create(config, Vocabulary(std::move(cps)));
  for (auto* param : p.list()) {
    const Array<float>& v = get(param->name);
    if (v.shape() != param->value.shape()) {
      throw CheckpointError("record " + param->name + " has shape " + shape_str(v.shape()) + ", expected " +
                            shape_str(param->value.shape()));
    }
    param->value = v.template cast<T>();
    param->zero_grad();
  }
  return p;
}

template <typename T>
ModelVars<T> bind(Graph<T>& g, ModelParams<T>& params) {
  ModelVars<T> v;
  v.embedding = g.param(params.embedding);
  v.lstm = bind(g, params.lstm);
  v.seq_lstm = bind(g, params.seq_lstm);
  v.w1 = g.param(params.w1);
  v.w3 = g.param(params.w3);
  v.w4 = g.param(params.w4);
  v.w5 = g.param(params.w5);
  v.w6 = g.param(params.w6);
  v.w7 = g.param(params.w7);
  v.w8 = g.param(params.w8);
  return v;
}

template <typename T>
Var<T> encode_question(const std::string& text, const ModelVars<T>& vars, const ModelParams<T>& params) {
  return lstm_encode_batch(vars.embedding, {params.vocab.encode(text, params.config.max_chars)}, vars.lstm);
}

template <typename T>
EncodedTable<T> encode_table(const Table& table, const ModelVars<T>& vars, const ModelParams<T>& params) {
  const int max_chars = params.config.max_chars;
  std::vector<std::vector<int>> headers, cells;
  for (const auto& h : table.headers()) headers.push_back(params.vocab.encode(h, max_chars));
  for (const auto& row : table.cells()) {
    for (const auto& cell : row) cells.push_back(params.vocab.encode(cell, max_chars));
  }
  EncodedTable<T> enc;
  enc.rows = table.rows();
  enc.cols = table.cols();
  const int d = params.config.d;
  enc.h = lstm_encode_batch(vars.embedding, headers, vars.lstm);
  enc.t1 = lstm_encode_batch(vars.embedding, cells, vars.lstm);
  // t_ij = ReLU((h_j W1) * t1_ij)
  Var<T> hw = ad::matmul(enc.h, vars.w1);
  Var<T> t1_3d = ad::reshape(enc.t1, {enc.rows, enc.cols, d});
  enc.t = ad::reshape(ad::relu(ad::mul(t1_3d, hw)), {enc.rows * enc.cols, d});
  return enc;
}

template <typename T>
Array<T> answer_indicators(const AnswerCoordinates& coords, int rows, int cols) {
  Array<T> p1({rows, cols});
  for (const Coord& c : coords) {
    if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols) {
      throw ShapeError("answer coordinate (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                       ") outside " + std::to_string(rows) + "x" + std::to_string(cols) + " table");
    }
    p1.at(c.row, c.col) = T(1);
  }
  return p1;
}

template <typename T>
Var<T> previous_relevance(Var<T> q, const Array<T>& p1, const ModelVars<T>& vars) {
  Graph<T>& g = *q.graph;
  Array<T> flat = p1;
  flat.reshape({static_cast<int>(p1.size()), 1});
  Var<T> scaled = ad::mul(g.constant(std::move(flat)), vars.w3);
  Var<T> bias = ad::sum_all(ad::mul(q, vars.w4));
  return ad::relu(ad::add(scaled, bias));
}

template <typename T>
EncodedTable<T> condition_on_previous(const EncodedTable<T>& encoded, Var<T> q, const Array<T>& p1,
                                      const ModelVars<T>& vars) {
  if (p1.size() != static_cast<size_t>(encoded.rows) * encoded.cols) {
    throw ShapeError("condition_on_previous: p1 " + shape_str(p1.shape()) + " for a " + std::to_string(encoded.rows) +
                     "x" + std::to_string(encoded.cols) + " table");
  }
  Var<T> p = previous_relevance(q, p1, vars);
  EncodedTable<T> out = encoded;
  out.t = ad::add(encoded.t, ad::mul_rows(encoded.t, p));
  return out;
}

#define SEQTAB_INSTANTIATE_ENCODER(T)                                                                          \
  template struct ModelParams<T>;                                                                              \
  template ModelVars<T> bind<T>(Graph<T>&, ModelParams<T>&);                                                   \
  template Var<T> encode_question<T>(const std::string&, const ModelVars<T>&, const ModelParams<T>&);          \
  template EncodedTable<T> encode_table<T>(const Table&, const ModelVars<T>&, const ModelParams<T>&);          \
  template Array<T> answer_indicators<T>(const AnswerCoordinates&, int, int);                                  \
  template Var<T> previous_relevance<T>(Var<T>, const Array<T>&, const ModelVars<T>&);                         \
  template EncodedTable<T> condition_on_previous<T>(const EncodedTable<T>&, Var<T>, const Array<T>&,           \
                                                    const ModelVars<T>&);

SEQTAB_INSTANTIATE_ENCODER(float)
SEQTAB_INSTANTIATE_ENCODER(double)

}  // namespace seqtab
