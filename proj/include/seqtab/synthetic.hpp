#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqtab/corpus_io.hpp"
#include "seqtab/logical_form.hpp"

namespace seqtab {

struct IntRange {
  int min = 0;
  int max = 0;
};

struct SyntheticSpec {
  int n_tables = 100;
  IntRange rows_range{4, 8};
  IntRange cols_range{3, 5};
  IntRange sequence_length_range{2, 4};
  // Target fraction per QuestionClass, indexed like kAllClasses.
  std::array<double, 4> class_mix{0.23, 0.27, 0.19, 0.31};
  uint64_t seed = 1;
  int sequences_per_table = 1;
  // When non-empty, key-column strings and headers (3 characters each) are
  // drawn over this alphabet instead of syllable names and header pools.
  std::string cell_alphabet;

  // Throws ValidationError for malformed or infeasible specs.
  void validate() const;

  // Missing keys keep their defaults. class_mix is an object keyed by class
  // name (SELECT_COLUMN, ...); ranges are [min, max] pairs.
  static SyntheticSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SyntheticCorpus {
  CorpusSplit corpus;
  // provenance[i][k] generated the gold answer of corpus.sequences[i].entries[k].
  std::vector<std::vector<LogicalForm>> provenance;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Provenance as TSV: sequence key, position, logical form.
std::string format_provenance(const SyntheticCorpus& synthetic);

}  // namespace seqtab
