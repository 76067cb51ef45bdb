#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqtab {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { kText, kNumber, kDate };

std::string to_string(ColumnKind kind);

struct Coord {
  int row = 0;
  int col = 0;
  auto operator<=>(const Coord&) const = default;
};

// A set of (row, col) cell positions. Iteration order is row-major.
class AnswerCoordinates {
 public:
  using const_iterator = std::set<Coord>::const_iterator;

  AnswerCoordinates() = default;
  AnswerCoordinates(std::initializer_list<Coord> coords) : coords_(coords) {}
  template <typename It>
  AnswerCoordinates(It first, It last) : coords_(first, last) {}

  void insert(Coord c) { coords_.insert(c); }
  bool contains(Coord c) const { return coords_.count(c) > 0; }
  bool empty() const { return coords_.empty(); }
  size_t size() const { return coords_.size(); }
  const_iterator begin() const { return coords_.begin(); }
  const_iterator end() const { return coords_.end(); }

  std::set<int> rows() const;
  std::set<int> cols() const;
  bool is_subset_of(const AnswerCoordinates& other) const;

  bool operator==(const AnswerCoordinates&) const = default;

 private:
  std::set<Coord> coords_;
};

// "(r, c)" list in the corpus convention: ['(0, 1)', '(2, 1)'].
std::string format_coordinates(const AnswerCoordinates& coords);

class Table {
 public:
  Table() = default;
  // Throws ValidationError on ragged rows, empty grids, or duplicate headers.
  Table(std::string id, std::vector<std::string> headers, std::vector<std::vector<std::string>> cells);

  const std::string& id() const { return id_; }
  int rows() const { return static_cast<int>(cells_.size()); }
  int cols() const { return static_cast<int>(headers_.size()); }
  const std::vector<std::string>& headers() const { return headers_; }
  const std::string& header(int col) const { return headers_.at(col); }
  const std::string& cell(int row, int col) const { return cells_.at(row).at(col); }
  const std::vector<std::vector<std::string>>& cells() const { return cells_; }
  ColumnKind kind(int col) const { return kinds_.at(col); }
  const std::vector<ColumnKind>& column_kinds() const { return kinds_; }

  bool in_bounds(Coord c) const { return c.row >= 0 && c.row < rows() && c.col >= 0 && c.col < cols(); }
  AnswerCoordinates column_cells(int col) const;
  // Throws ValidationError naming the first out-of-bounds coordinate.
  void check_bounds(const AnswerCoordinates& coords) const;

  // Table restricted to the given rows (in the given order).
  Table select_rows(std::span<const int> rows) const;

  bool operator==(const Table& other) const {
    return id_ == other.id_ && headers_ == other.headers_ && cells_ == other.cells_;
  }

 private:
  std::string id_;
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<ColumnKind> kinds_;
};

ColumnKind infer_column_kind(std::span<const std::string> values);

using TableMap = std::map<std::string, Table>;

struct QuestionEntry {
  std::string sequence_id;
  int position = 1;
  std::string text;
  AnswerCoordinates gold;
  std::vector<std::string> gold_text;
};

struct QuestionSequence {
  std::string id;
  std::string annotator;
  std::string table_id;
  std::vector<QuestionEntry> entries;

  // Key that identifies the sequence uniquely within a corpus.
  std::string key() const { return annotator.empty() ? id : id + "#" + annotator; }
};

// Texts of the gold cells in row-major order.
std::vector<std::string> cell_texts(const Table& table, const AnswerCoordinates& coords);

// Checks position contiguity, n >= 2, bounds and gold_text alignment.
void validate_sequence(const QuestionSequence& seq, const Table& table);

enum class QuestionClass { kSelectColumn = 0, kSelectSubset = 1, kSelectRow = 2, kComplex = 3 };
inline constexpr std::array<QuestionClass, 4> kAllClasses = {
    QuestionClass::kSelectColumn, QuestionClass::kSelectSubset, QuestionClass::kSelectRow, QuestionClass::kComplex};

std::string to_string(QuestionClass qc);
QuestionClass question_class_from_string(const std::string& s);

QuestionClass classify_question(const AnswerCoordinates& current, const AnswerCoordinates* previous,
                                const Table& table);

struct ClassDistribution {
  std::array<double, 4> overall{};
  // per_position[k][cls] for position k+1.
  std::vector<std::array<double, 4>> per_position;
  std::vector<size_t> position_counts;
  size_t n_questions = 0;

  double fraction(QuestionClass qc) const { return overall[static_cast<int>(qc)]; }
  double fraction_at(int position, QuestionClass qc) const {
    return per_position.at(position - 1)[static_cast<int>(qc)];
  }
};

ClassDistribution class_distribution(std::span<const QuestionSequence> corpus, const TableMap& tables);

}  // namespace seqtab
