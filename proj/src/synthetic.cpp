#include "seqtab/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <set>

#include "seqtab/text.hpp"

namespace seqtab {

namespace {

// Portable draws: std::uniform_int_distribution differs across standard
// libraries, which would break byte-identical output.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  int uniform(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<size_t>(uniform(0, static_cast<int>(i) - 1))]);
  }

 private:
  std::mt19937_64 engine_;
};

// Column-selection share at position 1 relative to its overall share.
constexpr double kFirstColumnLift = 0.51 / 0.23;

const std::vector<std::string> kKeyHeaders = {"Name",   "Team",   "Player", "Country", "City",
                                              "Club",   "Driver", "Nation", "School",  "Athlete"};
const std::vector<std::string> kNumberHeaders = {"Points", "Goals", "Wins",  "Losses", "Medals",
                                                 "Games",  "Assists", "Score", "Laps", "Votes"};
const std::vector<std::string> kDateHeaders = {"Date", "Debut", "Premiere", "Release"};
const std::vector<std::string> kSyllables = {"ka",  "lo",  "mi",  "ra",  "ven", "tor", "bel", "dan", "sil", "mor",
                                             "fen", "gar", "lin", "pas", "quo", "zan", "hel", "dor", "tev", "nix"};
const std::vector<std::string> kMonthNames = {"January", "February", "March",     "April",   "May",      "June",
                                              "July",    "August",   "September", "October", "November", "December"};

std::string lower(const std::string& s) { return text::to_lower_ascii(s); }

std::string plural(const std::string& header) {
  std::string h = lower(header);
  if (h.ends_with("s")) return h;
  if (h.size() > 1 && h.back() == 'y' && std::string("aeiou").find(h[h.size() - 2]) == std::string::npos) {
    return h.substr(0, h.size() - 1) + "ies";
  }
  return h + "s";
}

struct GenTable {
  Table table;
  std::vector<ColumnKind> planned;
};

GenTable make_table(const SyntheticSpec& spec, Rng& rng, const std::string& id) {
  const int rows = rng.uniform(spec.rows_range.min, spec.rows_range.max);
  const int cols = rng.uniform(spec.cols_range.min, spec.cols_range.max);

  std::vector<std::string> headers = {rng.pick(kKeyHeaders)};
  std::vector<ColumnKind> kinds = {ColumnKind::kText};
  std::vector<std::string> numbers = kNumberHeaders;
  rng.shuffle(numbers);
  std::vector<std::string> dates = kDateHeaders;
  rng.shuffle(dates);
  bool have_date = false;
  size_t next_number = 0;
  for (int c = 1; c < cols; ++c) {
    if (!have_date && rng.unit() < 0.2) {
      headers.push_back(dates[0]);
      kinds.push_back(ColumnKind::kDate);
      have_date = true;
    } else {
      headers.push_back(numbers[next_number++ % numbers.size()]);
      kinds.push_back(ColumnKind::kNumber);
    }
  }
  if (!spec.cell_alphabet.empty()) {
    // Headers over the alphabet too, distinct within the table.
    std::set<std::string> seen;
    for (auto& h : headers) {
      do {
        h.clear();
        for (int i = 0; i < 3; ++i) {
          h.push_back(spec.cell_alphabet[static_cast<size_t>(rng.uniform(0, static_cast<int>(spec.cell_alphabet.size()) - 1))]);
        }
      } while (!seen.insert(h).second);
    }
  }

  std::vector<std::vector<std::string>> cells(rows, std::vector<std::string>(cols));
  // Key column: unique strings.
  std::set<std::string> used;
  for (int r = 0; r < rows; ++r) {
    std::string v;
    for (int attempt = 0;; ++attempt) {
      v.clear();
      if (!spec.cell_alphabet.empty()) {
        int len = rng.uniform(3, 5);
        for (int i = 0; i < len; ++i) {
          v.push_back(spec.cell_alphabet[static_cast<size_t>(rng.uniform(0, static_cast<int>(spec.cell_alphabet.size()) - 1))]);
        }
      } else {
        int n = rng.uniform(2, 3);
        for (int i = 0; i < n; ++i) v += rng.pick(kSyllables);
        v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
      }
      if (used.insert(v).second) break;
      if (attempt > 1000) {
        v += std::to_string(r);
        used.insert(v);
        break;
      }
    }
    cells[r][0] = v;
  }
  for (int c = 1; c < cols; ++c) {
    if (kinds[c] == ColumnKind::kNumber) {
      std::vector<int> pool(static_cast<size_t>(std::max(100, rows * 3)));
      for (size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
      rng.shuffle(pool);
      for (int r = 0; r < rows; ++r) cells[r][c] = std::to_string(pool[r]);
    } else {
      std::vector<int> years;
      for (int y = 1950; y <= 2015; ++y) years.push_back(y);
      rng.shuffle(years);
      for (int r = 0; r < rows; ++r) {
        int y = years[static_cast<size_t>(r) % years.size()];
        cells[r][c] = kMonthNames[rng.uniform(0, 11)] + " " + std::to_string(rng.uniform(1, 28)) + ", " + std::to_string(y);
      }
    }
  }
  return {Table(id, headers, std::move(cells)), kinds};
}

struct Built {
  LogicalForm form;
  std::string text;
};

struct Context {
  const Table& table;
  Rng& rng;
  const AnswerCoordinates* previous;
};

std::string key_word(const Table& t) { return lower(t.header(0)); }

std::vector<int> ordered_columns(const Table& t, bool numbers_only) {
  std::vector<int> out;
  for (int c = 0; c < t.cols(); ++c) {
    if (t.kind(c) == ColumnKind::kNumber || (!numbers_only && t.kind(c) == ColumnKind::kDate)) out.push_back(c);
  }
  return out;
}

// Comparison threshold over the given rows that leaves a non-empty strict
// subset. Dates compare by year.
std::optional<std::string> pick_threshold(const Context& ctx, int col, const std::vector<int>& rows, CompareOp op) {
  std::vector<std::pair<double, std::string>> vals;
  std::set<double> seen;
  for (int r : rows) {
    const auto& cell = ctx.table.cell(r, col);
    if (ctx.table.kind(col) == ColumnKind::kDate) {
      auto d = text::parse_date(cell);
      if (!d) continue;
      int y = *d / 10000;
      if (seen.insert(y).second) vals.push_back({static_cast<double>(y), std::to_string(y)});
    } else {
      auto v = text::parse_number(cell);
      if (v && seen.insert(*v).second) vals.push_back({*v, text::normalize_ws(cell)});
    }
  }
  if (vals.size() < 2) return std::nullopt;
  std::sort(vals.begin(), vals.end());
  const int n = static_cast<int>(vals.size());
  int i = op == CompareOp::kGt ? ctx.rng.uniform(0, n - 2) : ctx.rng.uniform(1, n - 1);
  return vals[static_cast<size_t>(i)].second;
}

std::optional<Built> build_column(Context& ctx) {
  std::vector<int> cols;
  auto prev_cols = ctx.previous ? ctx.previous->cols() : std::set<int>{};
  for (int c = 0; c < ctx.table.cols(); ++c) {
    if (!prev_cols.count(c)) cols.push_back(c);
  }
  if (cols.empty()) {
    for (int c = 0; c < ctx.table.cols(); ++c) cols.push_back(c);
  }
  int c = ctx.rng.pick(cols);
  const std::string p = plural(ctx.table.header(c));
  const std::vector<std::string> templates = {"what are all of the " + p + "?", "what are the " + p + "?",
                                              "list all " + p + "."};
  return Built{SelectColumn{c}, ctx.rng.pick(templates)};
}

std::optional<Built> build_complex(Context& ctx) {
  const Table& t = ctx.table;
  std::vector<int> all_rows(t.rows());
  for (int r = 0; r < t.rows(); ++r) all_rows[r] = r;
  const int kind = ctx.rng.uniform(0, 2);
  auto numeric = ordered_columns(t, true);
  auto ordered = ordered_columns(t, false);
  if (kind == 0 && !numeric.empty()) {
    int col = ctx.rng.pick(numeric);
    bool max = ctx.rng.uniform(0, 1) == 0;
    const std::string n = lower(t.header(col));
    std::string word = max ? (ctx.rng.uniform(0, 1) ? "most" : "highest") : (ctx.rng.uniform(0, 1) ? "least" : "lowest");
    return Built{ArgExtreme{Scope::kWholeTable, col, max ? Extreme::kMax : Extreme::kMin, 0},
                 "which " + key_word(t) + " has the " + word + " " + n + "?"};
  }
  if (kind == 1 && !ordered.empty()) {
    int col = ctx.rng.pick(ordered);
    CompareOp op = ctx.rng.uniform(0, 1) ? CompareOp::kGt : CompareOp::kLt;
    auto v = pick_threshold(ctx, col, all_rows, op);
    if (!v) return std::nullopt;
    const bool date = t.kind(col) == ColumnKind::kDate;
    std::string rel = op == CompareOp::kGt ? (date ? "after" : (ctx.rng.uniform(0, 1) ? "more than" : "greater than"))
                                           : (date ? "before" : (ctx.rng.uniform(0, 1) ? "less than" : "under"));
    return Built{Filter{Scope::kWholeTable, col, op, *v}, "which " + plural(t.header(col)) + " are " + rel + " " + *v + "?"};
  }
  int r = ctx.rng.uniform(0, t.rows() - 1);
  const std::string v = t.cell(r, 0);
  return Built{Filter{Scope::kWholeTable, 0, CompareOp::kEq, v}, "which " + key_word(t) + " is " + v + "?"};
}

std::optional<Built> build_subset(Context& ctx) {
  if (!ctx.previous) return std::nullopt;
  const Table& t = ctx.table;
  auto cols = ctx.previous->cols();
  if (cols.size() != 1 || ctx.previous->size() < 2) return std::nullopt;
  const int k = *cols.begin();
  auto rs = ctx.previous->rows();
  std::vector<int> rows(rs.begin(), rs.end());
  const int kind = ctx.rng.uniform(0, 1);
  auto numeric = ordered_columns(t, true);
  if (kind == 0 && !numeric.empty()) {
    int col = ctx.rng.pick(numeric);
    bool max = ctx.rng.uniform(0, 1) == 0;
    std::string word = max ? (ctx.rng.uniform(0, 1) ? "most" : "highest") : (ctx.rng.uniform(0, 1) ? "least" : "lowest");
    std::string lead = ctx.rng.uniform(0, 1) ? "of those, which one has the " : "which of them has the ";
    return Built{ArgExtreme{Scope::kPreviousRows, col, max ? Extreme::kMax : Extreme::kMin, k},
                 lead + word + " " + lower(t.header(col)) + "?"};
  }
  if (t.kind(k) == ColumnKind::kText) {
    int r = ctx.rng.pick(rows);
    const std::string v = t.cell(r, k);
    return Built{Filter{Scope::kPreviousRows, k, CompareOp::kEq, v}, "which of those is " + v + "?"};
  }
  CompareOp op = ctx.rng.uniform(0, 1) ? CompareOp::kGt : CompareOp::kLt;
  auto v = pick_threshold(ctx, k, rows, op);
  if (!v) return std::nullopt;
  const bool date = t.kind(k) == ColumnKind::kDate;
  std::string rel = op == CompareOp::kGt ? (date ? "after" : "more than") : (date ? "before" : "less than");
  std::string lead = ctx.rng.uniform(0, 1) ? "which of those are " : "which of them are ";
  return Built{Filter{Scope::kPreviousRows, k, op, *v}, lead + rel + " " + *v + "?"};
}

std::optional<Built> build_row(Context& ctx) {
  if (!ctx.previous) return std::nullopt;
  const Table& t = ctx.table;
  auto prev_cols = ctx.previous->cols();
  std::vector<int> cols;
  for (int c = 0; c < t.cols(); ++c) {
    if (!prev_cols.count(c)) cols.push_back(c);
  }
  if (cols.empty()) return std::nullopt;
  int c = ctx.rng.pick(cols);
  const std::vector<std::string> templates = {"what is the " + lower(t.header(c)) + " of those?",
                                              "what are the " + plural(t.header(c)) + " of them?",
                                              "for those, what is the " + lower(t.header(c)) + "?"};
  return Built{ProjectRows{Scope::kPreviousRows, c}, ctx.rng.pick(templates)};
}

}  // namespace

void SyntheticSpec::validate() const {
  auto check_range = [](const IntRange& r, int lo, const char* what) {
    if (r.min < lo || r.max < r.min) {
      throw ValidationError(std::string("synthetic spec: invalid ") + what + " [" + std::to_string(r.min) + ", " +
                            std::to_string(r.max) + "]");
    }
  };
  if (n_tables < 1) throw ValidationError("synthetic spec: n_tables must be >= 1");
  if (sequences_per_table < 1) throw ValidationError("synthetic spec: sequences_per_table must be >= 1");
  check_range(rows_range, 1, "rows_range");
  check_range(cols_range, 1, "cols_range");
  check_range(sequence_length_range, 2, "sequence_length_range");
  double sum = 0;
  for (double f : class_mix) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ValidationError("synthetic spec: class fractions must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ValidationError("synthetic spec: class_mix must sum to 1");
  const double subset = class_mix[1], row = class_mix[2], complex = class_mix[3];
  if (row > 0 && cols_range.max < 2) {
    throw ValidationError("synthetic spec: SELECT_ROW requested but tables have at most one column");
  }
  if ((subset > 0 || row > 0 || complex > 0) && rows_range.max < 2) {
    throw ValidationError("synthetic spec: non-column classes requested but tables have at most one row");
  }
  if (subset > 0 && rows_range.max < 3) {
    throw ValidationError("synthetic spec: SELECT_SUBSET needs tables with at least three rows");
  }
  if (!cell_alphabet.empty() && cell_alphabet.find_first_of(" \t\r\n,\"") != std::string::npos) {
    throw ValidationError("synthetic spec: cell_alphabet must not contain separators");
  }
  if (!cell_alphabet.empty()) {
    const size_t k = std::set<char>(cell_alphabet.begin(), cell_alphabet.end()).size();
    if (k * k * k < static_cast<size_t>(cols_range.max)) {
      throw ValidationError("synthetic spec: cell_alphabet too small for distinct headers");
    }
  }
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticCorpus out;
  out.corpus.name = "train";

  std::array<size_t, 4> counts{};
  size_t total = 0;

  const std::array<std::function<std::optional<Built>(Context&)>, 4> builders = {build_column, build_subset, build_row,
                                                                                 build_complex};

  for (int ti = 0; ti < spec.n_tables; ++ti) {
    char idbuf[64];
    std::snprintf(idbuf, sizeof idbuf, "table_csv/synth_%04d.csv", ti);
    GenTable gt = make_table(spec, rng, idbuf);
    const Table& table = gt.table;

    for (int si = 0; si < spec.sequences_per_table; ++si) {
      QuestionSequence seq;
      seq.id = "synth-" + std::to_string(ti) + "-" + std::to_string(si);
      seq.annotator = "0";
      seq.table_id = table.id();
      std::vector<LogicalForm> forms;
      const int length = rng.uniform(spec.sequence_length_range.min, spec.sequence_length_range.max);
      std::optional<AnswerCoordinates> previous;

      for (int pos = 1; pos <= length; ++pos) {
        std::vector<int> allowed;
        for (int k = 0; k < 4; ++k) {
          if (spec.class_mix[k] <= 0) continue;
          if (pos == 1 && (k == 1 || k == 2)) continue;
          allowed.push_back(k);
        }
        // Opening questions lean towards whole columns, later ones fill the
        // remaining mix by deficit.
        std::optional<int> preferred;
        if (pos == 1 && allowed.size() > 1 && allowed.front() == 0) {
          const bool column_over =
              static_cast<double>(counts[0]) > (spec.class_mix[0] + 0.04) * static_cast<double>(total + 1);
          const double p = std::min(1.0, kFirstColumnLift * spec.class_mix[0]);
          const bool take_column = !column_over && rng.unit() < p;
          preferred = take_column ? 0 : allowed[1 + static_cast<size_t>(rng.uniform(0, static_cast<int>(allowed.size()) - 2))];
        }
        std::optional<Built> built;
        std::optional<AnswerCoordinates> gold;
        while (!allowed.empty() && !built) {
          int k;
          if (preferred && std::find(allowed.begin(), allowed.end(), *preferred) != allowed.end()) {
            k = *preferred;
            preferred.reset();
          } else {
            // Largest deficit first; ties broken at random.
            std::vector<double> deficit;
            double best = -1e300;
            for (int c : allowed) {
              double d = spec.class_mix[c] * static_cast<double>(total + 1) - static_cast<double>(counts[c]);
              deficit.push_back(d);
              best = std::max(best, d);
            }
            std::vector<int> top;
            for (size_t i = 0; i < allowed.size(); ++i) {
              if (deficit[i] >= best - 1e-12) top.push_back(allowed[i]);
            }
            k = rng.pick(top);
          }
          Context ctx{table, rng, previous ? &*previous : nullptr};
          for (int attempt = 0; attempt < 12 && !built; ++attempt) {
            auto cand = builders[k](ctx);
            if (!cand) continue;
            auto denot = execute(cand->form, table, ctx.previous);
            if (!denot) continue;
            if (previous && *denot == *previous) continue;
            if (static_cast<int>(classify_question(*denot, ctx.previous, table)) != k) continue;
            built = std::move(cand);
            gold = std::move(denot);
          }
          if (!built) allowed.erase(std::find(allowed.begin(), allowed.end(), k));
        }
        if (!built) {
          // Column selection of some column is always realizable.
          Context ctx{table, rng, previous ? &*previous : nullptr};
          built = build_column(ctx);
          gold = execute(built->form, table, ctx.previous);
        }
        QuestionEntry e;
        e.sequence_id = seq.id;
        e.position = pos;
        e.text = built->text;
        e.gold = *gold;
        e.gold_text = cell_texts(table, e.gold);
        ++counts[static_cast<int>(classify_question(e.gold, previous ? &*previous : nullptr, table))];
        ++total;
        previous = e.gold;
        seq.entries.push_back(std::move(e));
        forms.push_back(built->form);
      }
      out.corpus.sequences.push_back(std::move(seq));
      out.provenance.push_back(std::move(forms));
    }
    out.corpus.tables.emplace(table.id(), table);
  }
  return out;
}

std::string format_provenance(const SyntheticCorpus& synthetic) {
  std::string out = "sequence\tposition\tlogical_form\n";
  for (size_t i = 0; i < synthetic.corpus.sequences.size(); ++i) {
    const auto& seq = synthetic.corpus.sequences[i];
    for (size_t k = 0; k < seq.entries.size(); ++k) {
      out += seq.key() + "\t" + std::to_string(seq.entries[k].position) + "\t" + to_string(synthetic.provenance[i][k]) + "\n";
    }
  }
  return out;
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  SyntheticSpec spec;
  auto range = [&](const char* key, IntRange& r) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ValidationError(std::string("synthetic spec: ") + key + " must be [min, max]");
    r = {v.at(0).get<int>(), v.at(1).get<int>()};
  };
  spec.n_tables = j.value("n_tables", spec.n_tables);
  range("rows_range", spec.rows_range);
  range("cols_range", spec.cols_range);
  range("sequence_length_range", spec.sequence_length_range);
  if (j.contains("class_mix")) {
    spec.class_mix = {0, 0, 0, 0};
    for (const auto& [name, frac] : j.at("class_mix").items()) {
      spec.class_mix[static_cast<size_t>(question_class_from_string(name))] = frac.get<double>();
    }
  }
  spec.seed = j.value("seed", spec.seed);
  spec.sequences_per_table = j.value("sequences_per_table", spec.sequences_per_table);
  spec.cell_alphabet = j.value("cell_alphabet", spec.cell_alphabet);
  spec.validate();
  return spec;
}

nlohmann::json SyntheticSpec::to_json() const {
  nlohmann::json mix = nlohmann::json::object();
  for (QuestionClass qc : kAllClasses) mix[to_string(qc)] = class_mix[static_cast<size_t>(qc)];
  return {{"n_tables", n_tables},
          {"rows_range", {rows_range.min, rows_range.max}},
          {"cols_range", {cols_range.min, cols_range.max}},
          {"sequence_length_range", {sequence_length_range.min, sequence_length_range.max}},
          {"class_mix", mix},
          {"seed", seed},
          {"sequences_per_table", sequences_per_table},
          {"cell_alphabet", cell_alphabet}};
}

}  // namespace seqtab
