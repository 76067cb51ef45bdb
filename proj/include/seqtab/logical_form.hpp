#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "seqtab/table.hpp"

namespace seqtab {

class InvalidFormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scope { kWholeTable, kPreviousRows };
enum class CompareOp { kEq, kGt, kLt };
enum class Extreme { kMax, kMin };

struct SelectColumn {
  int col = 0;
  bool operator==(const SelectColumn&) const = default;
};

struct Filter {
  Scope scope = Scope::kWholeTable;
  int col = 0;
  CompareOp op = CompareOp::kEq;
  std::string value;
  bool operator==(const Filter&) const = default;
};

struct ArgExtreme {
  Scope scope = Scope::kWholeTable;
  int col = 0;
  Extreme extreme = Extreme::kMax;
  int project_col = 0;
  bool operator==(const ArgExtreme&) const = default;
};

struct ProjectRows {
  Scope scope = Scope::kPreviousRows;
  int col = 0;
  bool operator==(const ProjectRows&) const = default;
};

using LogicalForm = std::variant<SelectColumn, Filter, ArgExtreme, ProjectRows>;

// Compact textual form, e.g. filter(prev,2,gt,"5"). parse_logical_form is
// its inverse.
std::string to_string(const LogicalForm& form);
LogicalForm parse_logical_form(const std::string& s);

Scope scope_of(const LogicalForm& form);

// Column whose header the form is "about" (used for tie-breaking).
int primary_column(const LogicalForm& form);

// Throws InvalidFormError if the form is ill-typed for the table.
void validate_form(const LogicalForm& form, const Table& table, bool has_previous);

// Comparable key for ordering comparisons on number and date columns.
// For date columns a bare four-digit year compares at year granularity.
struct CompareKey {
  double value = 0;
  bool year_only = false;
};
std::optional<CompareKey> compare_key(const std::string& cell, ColumnKind kind);

// nullopt is the EmptyDenotation outcome. Throws InvalidFormError for
// ill-typed forms.
std::optional<AnswerCoordinates> execute(const LogicalForm& form, const Table& table,
                                         const AnswerCoordinates* previous);

}  // namespace seqtab
