#include "seqtab/table.hpp"

#include <algorithm>
#include <sstream>

#include "seqtab/text.hpp"

namespace seqtab {

namespace {

std::string coord_str(Coord c) { return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")"; }

}  // namespace

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kText: return "text";
    case ColumnKind::kNumber: return "number";
    case ColumnKind::kDate: return "date";
  }
  return "text";
}

std::set<int> AnswerCoordinates::rows() const {
  std::set<int> out;
  for (const auto& c : coords_) out.insert(c.row);
  return out;
}

std::set<int> AnswerCoordinates::cols() const {
  std::set<int> out;
  for (const auto& c : coords_) out.insert(c.col);
  return out;
}

bool AnswerCoordinates::is_subset_of(const AnswerCoordinates& other) const {
  return std::includes(other.coords_.begin(), other.coords_.end(), coords_.begin(), coords_.end());
}

std::string format_coordinates(const AnswerCoordinates& coords) {
  std::string out = "[";
  bool first = true;
  for (const auto& c : coords) {
    if (!first) out += ", ";
    first = false;
    out += "'" + coord_str(c) + "'";
  }
  out += "]";
  return out;
}

ColumnKind infer_column_kind(std::span<const std::string> values) {
  size_t non_empty = 0, numbers = 0, dates = 0;
  for (const auto& v : values) {
    if (text::normalize_ws(v).empty()) continue;
    ++non_empty;
    if (text::parse_number(v)) ++numbers;
    if (text::parse_date(v)) ++dates;
  }
  if (non_empty == 0) return ColumnKind::kText;
  // >= 80% with integer arithmetic: 5 * hits >= 4 * total
  if (5 * numbers >= 4 * non_empty) return ColumnKind::kNumber;
  if (5 * dates >= 4 * non_empty) return ColumnKind::kDate;
  return ColumnKind::kText;
}

Table::Table(std::string id, std::vector<std::string> headers, std::vector<std::vector<std::string>> cells)
    : id_(std::move(id)), headers_(std::move(headers)), cells_(std::move(cells)) {
  if (headers_.empty()) throw ValidationError("table '" + id_ + "': no columns");
  if (cells_.empty()) throw ValidationError("table '" + id_ + "': no rows");
  std::set<std::string> seen;
  for (const auto& h : headers_) {
    if (!seen.insert(text::normalize_ws(h)).second) {
      throw ValidationError("table '" + id_ + "': duplicate header '" + h + "'");
    }
  }
  for (size_t r = 0; r < cells_.size(); ++r) {
    if (cells_[r].size() != headers_.size()) {
      throw ValidationError("table '" + id_ + "': row " + std::to_string(r) + " has " +
                            std::to_string(cells_[r].size()) + " cells, expected " +
                            std::to_string(headers_.size()));
    }
  }
  kinds_.reserve(headers_.size());
  std::vector<std::string> column(cells_.size());
  for (size_t c = 0; c < headers_.size(); ++c) {
    for (size_t r = 0; r < cells_.size(); ++r) column[r] = cells_[r][c];
    kinds_.push_back(infer_column_kind(column));
  }
}

AnswerCoordinates Table::column_cells(int col) const {
  AnswerCoordinates out;
  for (int r = 0; r < rows(); ++r) out.insert({r, col});
  return out;
}

void Table::check_bounds(const AnswerCoordinates& coords) const {
  for (const auto& c : coords) {
    if (!in_bounds(c)) {
      throw ValidationError("coordinate " + coord_str(c) + " out of bounds for table '" + id_ + "' (" +
                            std::to_string(rows()) + "x" + std::to_string(cols()) + ")");
    }
  }
}

Table Table::select_rows(std::span<const int> rows) const {
  std::vector<std::vector<std::string>> kept;
  kept.reserve(rows.size());
  for (int r : rows) kept.push_back(cells_.at(r));
  return Table(id_, headers_, std::move(kept));
}

std::vector<std::string> cell_texts(const Table& table, const AnswerCoordinates& coords) {
  std::vector<std::string> out;
  out.reserve(coords.size());
  for (const auto& c : coords) out.push_back(table.cell(c.row, c.col));
  return out;
}

void validate_sequence(const QuestionSequence& seq, const Table& table) {
  if (seq.entries.size() < 2) {
    throw ValidationError("sequence '" + seq.key() + "': has " + std::to_string(seq.entries.size()) +
                          " question(s), at least 2 required");
  }
  for (size_t i = 0; i < seq.entries.size(); ++i) {
    const auto& e = seq.entries[i];
    if (e.position != static_cast<int>(i) + 1) {
      throw ValidationError("sequence '" + seq.key() + "': non-contiguous positions (expected " +
                            std::to_string(i + 1) + ", got " + std::to_string(e.position) + ")");
    }
    if (e.gold.empty()) {
      throw ValidationError("sequence '" + seq.key() + "' position " + std::to_string(e.position) +
                            ": empty gold answer");
    }
    table.check_bounds(e.gold);
    if (!e.gold_text.empty()) {
      auto expected = cell_texts(table, e.gold);
      if (expected.size() != e.gold_text.size()) {
        throw ValidationError("sequence '" + seq.key() + "' position " + std::to_string(e.position) +
                              ": answer_text has " + std::to_string(e.gold_text.size()) + " items for " +
                              std::to_string(expected.size()) + " coordinates");
      }
      for (size_t k = 0; k < expected.size(); ++k) {
        if (text::normalize_ws(expected[k]) != text::normalize_ws(e.gold_text[k])) {
          throw ValidationError("sequence '" + seq.key() + "' position " + std::to_string(e.position) +
                                ": answer_text '" + e.gold_text[k] + "' does not match cell '" + expected[k] + "'");
        }
      }
    }
  }
}

std::string to_string(QuestionClass qc) {
  switch (qc) {
    case QuestionClass::kSelectColumn: return "SELECT_COLUMN";
    case QuestionClass::kSelectSubset: return "SELECT_SUBSET";
    case QuestionClass::kSelectRow: return "SELECT_ROW";
    case QuestionClass::kComplex: return "COMPLEX";
  }
  return "COMPLEX";
}

QuestionClass question_class_from_string(const std::string& s) {
  for (auto qc : kAllClasses) {
    if (to_string(qc) == s) return qc;
  }
  throw ValidationError("unknown question class '" + s + "'");
}

QuestionClass classify_question(const AnswerCoordinates& current, const AnswerCoordinates* previous,
                                const Table& table) {
  table.check_bounds(current);
  if (previous) table.check_bounds(*previous);

  auto cols = current.cols();
  if (cols.size() == 1 && current == table.column_cells(*cols.begin())) return QuestionClass::kSelectColumn;
  if (!previous) return QuestionClass::kComplex;
  if (current.is_subset_of(*previous)) return QuestionClass::kSelectSubset;

  auto prev_rows = previous->rows();
  auto cur_rows = current.rows();
  bool rows_within = std::includes(prev_rows.begin(), prev_rows.end(), cur_rows.begin(), cur_rows.end());
  auto prev_cols = previous->cols();
  bool cols_disjoint = std::none_of(cols.begin(), cols.end(), [&](int c) { return prev_cols.count(c) > 0; });
  if (rows_within && cols_disjoint) return QuestionClass::kSelectRow;
  return QuestionClass::kComplex;
}

ClassDistribution class_distribution(std::span<const QuestionSequence> corpus, const TableMap& tables) {
  if (corpus.empty()) throw ValidationError("class_distribution: empty corpus");
  std::array<size_t, 4> totals{};
  std::vector<std::array<size_t, 4>> by_pos;
  ClassDistribution dist;
  for (const auto& seq : corpus) {
    auto it = tables.find(seq.table_id);
    if (it == tables.end()) throw ValidationError("sequence '" + seq.key() + "': unknown table '" + seq.table_id + "'");
    const AnswerCoordinates* prev = nullptr;
    for (size_t i = 0; i < seq.entries.size(); ++i) {
      auto qc = classify_question(seq.entries[i].gold, prev, it->second);
      int k = static_cast<int>(qc);
      ++totals[k];
      if (by_pos.size() <= i) by_pos.resize(i + 1);
      ++by_pos[i][k];
      ++dist.n_questions;
      prev = &seq.entries[i].gold;
    }
  }
  if (dist.n_questions == 0) throw ValidationError("class_distribution: corpus has no questions");
  for (int k = 0; k < 4; ++k) dist.overall[k] = static_cast<double>(totals[k]) / dist.n_questions;
  for (const auto& counts : by_pos) {
    size_t n = counts[0] + counts[1] + counts[2] + counts[3];
    std::array<double, 4> frac{};
    for (int k = 0; k < 4; ++k) frac[k] = n ? static_cast<double>(counts[k]) / n : 0.0;
    dist.per_position.push_back(frac);
    dist.position_counts.push_back(n);
  }
  return dist;
}

}  // namespace seqtab
