#include "seqtab/evaluation.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace seqtab {

int position_bucket(int position) { return std::min(std::max(position, 1), kPositionBuckets) - 1; }

EvalReport score(const PredictionMap& predictions, const CorpusSplit& gold) {
  EvalReport r;
  std::array<size_t, kPositionBuckets> correct{};
  size_t total_correct = 0, sequences_correct = 0;
  for (const auto& seq : gold.sequences) {
    bool all = true;
    for (const auto& e : seq.entries) {
      auto it = predictions.find({seq.key(), e.position});
      if (it == predictions.end()) {
        throw std::invalid_argument("no prediction for sequence " + seq.key() + " position " +
                                    std::to_string(e.position));
      }
      const bool ok = it->second == e.gold;
      const int b = position_bucket(e.position);
      ++r.position_counts[static_cast<size_t>(b)];
      if (ok) {
        ++correct[static_cast<size_t>(b)];
        ++total_correct;
      }
      all = all && ok;
      ++r.n_questions;
    }
    if (all) ++sequences_correct;
    ++r.n_sequences;
  }
  if (r.n_questions > 0) r.overall_accuracy = static_cast<double>(total_correct) / static_cast<double>(r.n_questions);
  if (r.n_sequences > 0) {
    r.sequence_accuracy = static_cast<double>(sequences_correct) / static_cast<double>(r.n_sequences);
  }
  for (size_t b = 0; b < kPositionBuckets; ++b) {
    if (r.position_counts[b] > 0) {
      r.per_position[b] = static_cast<double>(correct[b]) / static_cast<double>(r.position_counts[b]);
    }
  }
  return r;
}

PredictionMap to_prediction_map(const std::vector<std::vector<AnswerCoordinates>>& predictions,
                                const CorpusSplit& corpus) {
  if (predictions.size() != corpus.sequences.size()) {
    throw std::invalid_argument("predictions cover " + std::to_string(predictions.size()) + " sequences, corpus has " +
                                std::to_string(corpus.sequences.size()));
  }
  PredictionMap out;
  for (size_t s = 0; s < predictions.size(); ++s) {
    const auto& seq = corpus.sequences[s];
    for (size_t k = 0; k < predictions[s].size() && k < seq.entries.size(); ++k) {
      out[{seq.key(), seq.entries[k].position}] = predictions[s][k];
    }
  }
  return out;
}

EvalReport score(const std::vector<std::vector<AnswerCoordinates>>& predictions, const CorpusSplit& gold) {
  return score(to_prediction_map(predictions, gold), gold);
}

double oracle_score(const std::vector<std::vector<AnswerCoordinates>>& candidate_denotations,
                    const std::vector<AnswerCoordinates>& gold) {
  if (candidate_denotations.size() != gold.size()) {
    throw std::invalid_argument("oracle_score: " + std::to_string(candidate_denotations.size()) +
                                " candidate lists for " + std::to_string(gold.size()) + " questions");
  }
  if (gold.empty()) return 0.0;
  size_t hits = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    for (const auto& d : candidate_denotations[i]) {
      if (d == gold[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double oracle_score(const std::vector<CandidateSet>& candidate_sets, const std::vector<AnswerCoordinates>& gold) {
  std::vector<std::vector<AnswerCoordinates>> denotations;
  for (const auto& set : candidate_sets) {
    auto& list = denotations.emplace_back();
    for (const auto& c : set.candidates) {
      if (c.denotation) list.push_back(*c.denotation);
    }
  }
  return oracle_score(denotations, gold);
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_position = nlohmann::json::array();
  for (size_t b = 0; b < kPositionBuckets; ++b) {
    per_position.push_back({{"position", b + 1 == kPositionBuckets ? std::to_string(b + 1) + "+" : std::to_string(b + 1)},
                            {"accuracy", r.per_position[b]},
                            {"n_questions", r.position_counts[b]}});
  }
  return {{"overall_accuracy", r.overall_accuracy},
          {"per_position", per_position},
          {"sequence_accuracy", r.sequence_accuracy},
          {"sequence_accuracy_note", "added metric: fraction of sequences with every question correct"},
          {"n_questions", r.n_questions},
          {"n_sequences", r.n_sequences}};
}

std::string format_report_tsv(const EvalReport& r) {
  std::ostringstream out;
  out << "metric\tvalue\n";
  out << "overall_accuracy\t" << r.overall_accuracy << "\n";
  for (size_t b = 0; b < kPositionBuckets; ++b) {
    out << "position_" << b + 1 << (b + 1 == kPositionBuckets ? "+" : "") << "_accuracy\t" << r.per_position[b]
        << "\n";
  }
  out << "sequence_accuracy\t" << r.sequence_accuracy << "\n";
  out << "n_questions\t" << r.n_questions << "\n";
  out << "n_sequences\t" << r.n_sequences << "\n";
  return out.str();
}

std::string format_predictions_tsv(const PredictionMap& predictions, const CorpusSplit& gold) {
  std::ostringstream out;
  out << "sequence_id\tposition\tanswer_coordinates\tcorrect\n";
  for (const auto& seq : gold.sequences) {
    for (const auto& e : seq.entries) {
      auto it = predictions.find({seq.key(), e.position});
      if (it == predictions.end()) continue;
      out << seq.key() << '\t' << e.position << '\t' << format_coordinates(it->second) << '\t'
          << (it->second == e.gold ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

PredictionMap parse_predictions_tsv(const std::string& content) {
  PredictionMap out;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() < 3) {
      throw LoadError("predictions line " + std::to_string(line_no) + ": expected at least 3 tab-separated fields");
    }
    int position = 0;
    try {
      position = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw LoadError("predictions line " + std::to_string(line_no) + ": bad position '" + fields[1] + "'");
    }
    out[{fields[0], position}] = parse_coordinates(fields[2]);
  }
  return out;
}

PredictionMap load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open predictions file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_predictions_tsv(ss.str());
}

}  // namespace seqtab
