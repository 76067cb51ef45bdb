#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqtab/table.hpp"

namespace seqtab {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusSplit {
  std::string name = "train";  // train | dev | test
  std::vector<QuestionSequence> sequences;
  TableMap tables;

  size_t n_questions() const;
  const Table& table_for(const QuestionSequence& seq) const;
};

// RFC-4180 CSV.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);
std::string format_csv(const std::vector<std::vector<std::string>>& rows);

Table load_table_csv(const std::filesystem::path& path, const std::string& table_id);
void save_table_csv(const Table& table, const std::filesystem::path& path);

// Python-literal lists as used by the corpus columns.
std::vector<std::string> parse_string_list(std::string_view s);
std::string format_string_list(const std::vector<std::string>& items);
AnswerCoordinates parse_coordinates(std::string_view s);

// Reads the tab-separated corpus; table_file paths are resolved against
// tables_dir. Sequences are keyed by (id, annotator). Zero-based positions
// (the released-dataset convention) are shifted to start at 1.
CorpusSplit load_corpus(const std::filesystem::path& corpus_path, const std::filesystem::path& tables_dir,
                        std::string name = "train");

// Writes the corpus TSV and every referenced table under tables_dir.
void save_corpus(const CorpusSplit& split, const std::filesystem::path& corpus_path,
                 const std::filesystem::path& tables_dir);

std::string format_corpus_tsv(const CorpusSplit& split);

// Splits by table so that dev tables are unseen in train.
std::pair<CorpusSplit, CorpusSplit> split_dev(const CorpusSplit& train, double fraction, uint64_t seed);

// Deterministic split by a hash of the table id, used when the original
// fold assignment is not available.
std::pair<CorpusSplit, CorpusSplit> split_by_table_hash(const CorpusSplit& corpus, double test_fraction);

}  // namespace seqtab
