#include "seqtab/logical_form.hpp"

#include <cmath>
#include <sstream>

#include "seqtab/text.hpp"

namespace seqtab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const char* scope_str(Scope s) { return s == Scope::kWholeTable ? "all" : "prev"; }
const char* op_str(CompareOp op) { return op == CompareOp::kEq ? "eq" : op == CompareOp::kGt ? "gt" : "lt"; }

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<int> scope_rows(Scope scope, const Table& table, const AnswerCoordinates* previous) {
  std::vector<int> rows;
  if (scope == Scope::kWholeTable) {
    for (int r = 0; r < table.rows(); ++r) rows.push_back(r);
  } else {
    for (int r : previous->rows()) rows.push_back(r);
  }
  return rows;
}

bool ordered_kind(ColumnKind k) { return k == ColumnKind::kNumber || k == ColumnKind::kDate; }

void check_col(const Table& table, int col, const char* what) {
  if (col < 0 || col >= table.cols()) {
    throw InvalidFormError(std::string(what) + " column " + std::to_string(col) + " out of range");
  }
}

double year_of(double ordinal) { return std::floor(ordinal / 10000.0); }

int compare_keys(const CompareKey& a, const CompareKey& b) {
  double x = a.value, y = b.value;
  if (a.year_only || b.year_only) {
    x = year_of(x);
    y = year_of(y);
  }
  return x < y ? -1 : (x > y ? 1 : 0);
}

}  // namespace

std::string to_string(const LogicalForm& form) {
  return std::visit(
      Overloaded{
          [](const SelectColumn& f) { return "select(" + std::to_string(f.col) + ")"; },
          [](const Filter& f) {
            return std::string("filter(") + scope_str(f.scope) + "," + std::to_string(f.col) + "," + op_str(f.op) +
                   "," + quote(f.value) + ")";
          },
          [](const ArgExtreme& f) {
            return std::string(f.extreme == Extreme::kMax ? "argmax(" : "argmin(") + scope_str(f.scope) + "," +
                   std::to_string(f.col) + "," + std::to_string(f.project_col) + ")";
          },
          [](const ProjectRows& f) {
            return std::string("project(") + scope_str(f.scope) + "," + std::to_string(f.col) + ")";
          },
      },
      form);
}

LogicalForm parse_logical_form(const std::string& s) {
  auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw InvalidFormError("malformed logical form '" + s + "'");
  std::string name = s.substr(0, open);
  // Split arguments, honouring a quoted final argument.
  std::vector<std::string> args;
  std::string cur;
  bool in_quote = false;
  for (size_t i = open + 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (in_quote) {
      if (c == '\\' && i + 2 < s.size()) {
        cur.push_back(s[++i]);
      } else if (c == '"') {
        in_quote = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      in_quote = true;
    } else if (c == ',') {
      args.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  args.push_back(cur);
  auto parse_scope = [&](const std::string& a) {
    if (a == "all") return Scope::kWholeTable;
    if (a == "prev") return Scope::kPreviousRows;
    throw InvalidFormError("bad scope '" + a + "' in '" + s + "'");
  };
  auto num = [&](const std::string& a) {
    try {
      return std::stoi(a);
    } catch (...) {
      throw InvalidFormError("bad column '" + a + "' in '" + s + "'");
    }
  };
  if (name == "select" && args.size() == 1) return SelectColumn{num(args[0])};
  if (name == "filter" && args.size() == 4) {
    CompareOp op;
    if (args[2] == "eq") op = CompareOp::kEq;
    else if (args[2] == "gt") op = CompareOp::kGt;
    else if (args[2] == "lt") op = CompareOp::kLt;
    else throw InvalidFormError("bad operator in '" + s + "'");
    return Filter{parse_scope(args[0]), num(args[1]), op, args[3]};
  }
  if ((name == "argmax" || name == "argmin") && args.size() == 3) {
    return ArgExtreme{parse_scope(args[0]), num(args[1]), name == "argmax" ? Extreme::kMax : Extreme::kMin,
                      num(args[2])};
  }
  if (name == "project" && args.size() == 2) return ProjectRows{parse_scope(args[0]), num(args[1])};
  throw InvalidFormError("malformed logical form '" + s + "'");
}

Scope scope_of(const LogicalForm& form) {
  return std::visit(Overloaded{
                        [](const SelectColumn&) { return Scope::kWholeTable; },
                        [](const auto& f) { return f.scope; },
                    },
                    form);
}

int primary_column(const LogicalForm& form) {
  return std::visit(Overloaded{
                        [](const ArgExtreme& f) { return f.project_col; },
                        [](const auto& f) { return f.col; },
                    },
                    form);
}

std::optional<CompareKey> compare_key(const std::string& cell, ColumnKind kind) {
  if (kind == ColumnKind::kNumber) {
    if (auto v = text::parse_number(cell)) return CompareKey{*v, false};
    return std::nullopt;
  }
  if (kind == ColumnKind::kDate) {
    if (auto d = text::parse_date(cell)) return CompareKey{static_cast<double>(*d), false};
    if (auto y = text::parse_year(cell)) return CompareKey{static_cast<double>(*y) * 10000.0, true};
  }
  return std::nullopt;
}

void validate_form(const LogicalForm& form, const Table& table, bool has_previous) {
  if (scope_of(form) == Scope::kPreviousRows && !has_previous) {
    throw InvalidFormError(to_string(form) + ": previous-answer scope without a previous answer");
  }
  std::visit(Overloaded{
                 [&](const SelectColumn& f) { check_col(table, f.col, "select"); },
                 [&](const Filter& f) {
                   check_col(table, f.col, "filter");
                   if (f.op == CompareOp::kEq) return;
                   if (!ordered_kind(table.kind(f.col))) {
                     throw InvalidFormError(to_string(form) + ": ordering comparison on " +
                                            to_string(table.kind(f.col)) + " column");
                   }
                   if (!compare_key(f.value, table.kind(f.col))) {
                     throw InvalidFormError(to_string(form) + ": value '" + f.value + "' is not comparable");
                   }
                 },
                 [&](const ArgExtreme& f) {
                   check_col(table, f.col, "argmax/argmin");
                   check_col(table, f.project_col, "projection");
                   if (!ordered_kind(table.kind(f.col))) {
                     throw InvalidFormError(to_string(form) + ": extreme over " + to_string(table.kind(f.col)) +
                                            " column");
                   }
                 },
                 [&](const ProjectRows& f) { check_col(table, f.col, "project"); },
             },
             form);
}

std::optional<AnswerCoordinates> execute(const LogicalForm& form, const Table& table,
                                         const AnswerCoordinates* previous) {
  validate_form(form, table, previous != nullptr && !previous->empty());
  AnswerCoordinates out;
  std::visit(Overloaded{
                 [&](const SelectColumn& f) { out = table.column_cells(f.col); },
                 [&](const Filter& f) {
                   const auto kind = table.kind(f.col);
                   const std::string want = text::normalize_ws(f.value);
                   std::optional<CompareKey> value_key;
                   if (f.op != CompareOp::kEq) value_key = compare_key(f.value, kind);
                   for (int r : scope_rows(f.scope, table, previous)) {
                     const auto& cell = table.cell(r, f.col);
                     bool hit = false;
                     if (f.op == CompareOp::kEq) {
                       hit = text::normalize_ws(cell) == want;
                     } else if (auto k = compare_key(cell, kind)) {
                       int cmp = compare_keys(*k, *value_key);
                       hit = f.op == CompareOp::kGt ? cmp > 0 : cmp < 0;
                     }
                     if (hit) out.insert({r, f.col});
                   }
                 },
                 [&](const ArgExtreme& f) {
                   const auto kind = table.kind(f.col);
                   std::optional<CompareKey> best;
                   std::vector<int> best_rows;
                   for (int r : scope_rows(f.scope, table, previous)) {
                     auto k = compare_key(table.cell(r, f.col), kind);
                     if (!k) continue;
                     int cmp = best ? compare_keys(*k, *best) : 1;
                     if (f.extreme == Extreme::kMin && best) cmp = -cmp;
                     if (!best || cmp > 0) {
                       best = k;
                       best_rows = {r};
                     } else if (cmp == 0) {
                       best_rows.push_back(r);
                     }
                   }
                   for (int r : best_rows) out.insert({r, f.project_col});
                 },
                 [&](const ProjectRows& f) {
                   for (int r : scope_rows(f.scope, table, previous)) out.insert({r, f.col});
                 },
             },
             form);
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace seqtab
