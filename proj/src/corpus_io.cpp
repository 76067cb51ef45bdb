#include "seqtab/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "seqtab/text.hpp"

namespace seqtab {

namespace fs = std::filesystem;

namespace {

const char* kCorpusHeader = "id\tannotator\tposition\tquestion\ttable_file\tanswer_coordinates\tanswer_text";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

int parse_int(std::string_view s, const std::string& what) {
  auto t = text::normalize_ws(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw LoadError("invalid " + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::string escape_for_quote(const std::string& s, char quote) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c == quote) out.push_back('\\');
        out.push_back(c);
    }
  }
  return out;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CorpusSplit subset_by_tables(const CorpusSplit& src, const std::set<std::string>& table_ids, std::string name) {
  CorpusSplit out;
  out.name = std::move(name);
  for (const auto& seq : src.sequences) {
    if (table_ids.count(seq.table_id)) out.sequences.push_back(seq);
  }
  for (const auto& id : table_ids) out.tables.emplace(id, src.tables.at(id));
  return out;
}

}  // namespace

size_t CorpusSplit::n_questions() const {
  size_t n = 0;
  for (const auto& s : sequences) n += s.entries.size();
  return n;
}

const Table& CorpusSplit::table_for(const QuestionSequence& seq) const {
  auto it = tables.find(seq.table_id);
  if (it == tables.end()) throw LoadError("sequence '" + seq.key() + "': unknown table '" + seq.table_id + "'");
  return it->second;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t i = 0;
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '\n') {
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw LoadError("unterminated quoted CSV field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::string format_csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out.push_back(',');
      const auto& f = row[j];
      bool quote = f.find_first_of(",\"\r\n") != std::string::npos || (row.size() == 1 && f.empty());
      if (!quote) {
        out += f;
        continue;
      }
      out.push_back('"');
      for (char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    }
    out.push_back('\n');
  }
  return out;
}

Table load_table_csv(const fs::path& path, const std::string& table_id) {
  if (!fs::exists(path)) throw LoadError("missing table file '" + path.string() + "'");
  auto rows = parse_csv(read_file(path));
  if (rows.empty()) throw LoadError("table file '" + path.string() + "' is empty");
  std::vector<std::string> headers = std::move(rows.front());
  rows.erase(rows.begin());
  try {
    return Table(table_id, std::move(headers), std::move(rows));
  } catch (const ValidationError& e) {
    throw LoadError("table file '" + path.string() + "': " + e.what());
  }
}

void save_table_csv(const Table& table, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::vector<std::vector<std::string>> rows;
  rows.push_back(table.headers());
  for (const auto& r : table.cells()) rows.push_back(r);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out << format_csv(rows);
}

std::vector<std::string> parse_string_list(std::string_view s) {
  std::string t(s);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  t.erase(0, std::min(t.size(), t.find_first_not_of(" \t\r\n")));
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw LoadError("expected bracketed list, got '" + t + "'");
  std::vector<std::string> out;
  size_t i = 1;
  const size_t end = t.size() - 1;
  auto skip_ws = [&] {
    while (i < end && (t[i] == ' ' || t[i] == '\t')) ++i;
  };
  skip_ws();
  if (i == end) return out;
  while (i < end) {
    skip_ws();
    std::string item;
    if (t[i] == '\'' || t[i] == '"') {
      char q = t[i++];
      bool closed = false;
      while (i < end) {
        char c = t[i++];
        if (c == '\\' && i < end) {
          char e = t[i++];
          switch (e) {
            case 'n': item.push_back('\n'); break;
            case 't': item.push_back('\t'); break;
            case 'r': item.push_back('\r'); break;
            default: item.push_back(e);
          }
        } else if (c == q) {
          closed = true;
          break;
        } else {
          item.push_back(c);
        }
      }
      if (!closed) throw LoadError("unterminated string in list '" + t + "'");
    } else {
      // Unquoted item: read to the next top-level comma.
      int depth = 0;
      while (i < end && !(t[i] == ',' && depth == 0)) {
        if (t[i] == '(') ++depth;
        if (t[i] == ')') --depth;
        item.push_back(t[i++]);
      }
      item = text::normalize_ws(item);
    }
    out.push_back(std::move(item));
    skip_ws();
    if (i < end) {
      if (t[i] != ',') throw LoadError("malformed list '" + t + "'");
      ++i;
    }
  }
  return out;
}

std::string format_string_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    const auto& s = items[i];
    char q = (s.find('\'') != std::string::npos && s.find('"') == std::string::npos) ? '"' : '\'';
    out.push_back(q);
    out += escape_for_quote(s, q);
    out.push_back(q);
  }
  out += "]";
  return out;
}

AnswerCoordinates parse_coordinates(std::string_view s) {
  AnswerCoordinates coords;
  for (const auto& item : parse_string_list(s)) {
    std::string t = text::normalize_ws(item);
    if (t.size() < 5 || t.front() != '(' || t.back() != ')') throw LoadError("malformed coordinate '" + item + "'");
    auto comma = t.find(',');
    if (comma == std::string::npos) throw LoadError("malformed coordinate '" + item + "'");
    int r = parse_int(std::string_view(t).substr(1, comma - 1), "row index");
    int c = parse_int(std::string_view(t).substr(comma + 1, t.size() - comma - 2), "column index");
    coords.insert({r, c});
  }
  return coords;
}

CorpusSplit load_corpus(const fs::path& corpus_path, const fs::path& tables_dir, std::string name) {
  std::string content = read_file(corpus_path);
  std::vector<std::string_view> lines;
  {
    std::string_view v(content);
    size_t start = 0;
    while (start < v.size()) {
      size_t pos = v.find('\n', start);
      if (pos == std::string_view::npos) pos = v.size();
      auto line = v.substr(start, pos - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = pos + 1;
    }
  }
  if (lines.empty()) throw LoadError("corpus '" + corpus_path.string() + "' is empty");
  if (lines[0] != kCorpusHeader) {
    throw LoadError("corpus '" + corpus_path.string() + "' line 1: unexpected header");
  }

  CorpusSplit split;
  split.name = std::move(name);
  struct Pending {
    QuestionSequence seq;
    std::vector<size_t> line_numbers;
  };
  std::vector<Pending> pending;
  std::map<std::pair<std::string, std::string>, size_t> index;

  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const size_t line_no = li + 1;
    auto fields = split_tabs(lines[li]);
    auto where = [&](const std::string& id) { return "line " + std::to_string(line_no) + " (sequence '" + id + "')"; };
    if (fields.size() != 7) {
      throw LoadError("line " + std::to_string(line_no) + ": expected 7 fields, got " + std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    const std::string& annotator = fields[1];
    const std::string& table_file = fields[4];
    try {
      QuestionEntry entry;
      entry.sequence_id = id;
      entry.position = parse_int(fields[2], "position");
      entry.text = fields[3];
      entry.gold = parse_coordinates(fields[5]);
      entry.gold_text = parse_string_list(fields[6]);

      auto tit = split.tables.find(table_file);
      if (tit == split.tables.end()) {
        tit = split.tables.emplace(table_file, load_table_csv(tables_dir / table_file, table_file)).first;
      }
      tit->second.check_bounds(entry.gold);

      auto key = std::make_pair(id, annotator);
      auto [it, inserted] = index.emplace(key, pending.size());
      if (inserted) {
        Pending p;
        p.seq.id = id;
        p.seq.annotator = annotator;
        p.seq.table_id = table_file;
        pending.push_back(std::move(p));
      }
      auto& p = pending[it->second];
      if (p.seq.table_id != table_file) throw LoadError("table_file differs within one sequence");
      p.seq.entries.push_back(std::move(entry));
      p.line_numbers.push_back(line_no);
    } catch (const std::exception& e) {
      throw LoadError(where(id) + ": " + e.what());
    }
  }

  for (auto& p : pending) {
    std::vector<size_t> order(p.seq.entries.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return p.seq.entries[a].position < p.seq.entries[b].position; });
    std::vector<QuestionEntry> sorted;
    for (size_t i : order) sorted.push_back(std::move(p.seq.entries[i]));
    p.seq.entries = std::move(sorted);
    if (!p.seq.entries.empty() && p.seq.entries.front().position == 0) {
      for (auto& e : p.seq.entries) e.position += 1;
    }
    try {
      validate_sequence(p.seq, split.tables.at(p.seq.table_id));
    } catch (const std::exception& e) {
      size_t first_line = *std::min_element(p.line_numbers.begin(), p.line_numbers.end());
      throw LoadError("line " + std::to_string(first_line) + " (sequence '" + p.seq.key() + "'): " + e.what());
    }
    split.sequences.push_back(std::move(p.seq));
  }
  return split;
}

std::string format_corpus_tsv(const CorpusSplit& split) {
  std::string out = kCorpusHeader;
  out.push_back('\n');
  for (const auto& seq : split.sequences) {
    for (const auto& e : seq.entries) {
      out += seq.id + "\t" + seq.annotator + "\t" + std::to_string(e.position) + "\t" + e.text + "\t" + seq.table_id +
             "\t" + format_coordinates(e.gold) + "\t" + format_string_list(e.gold_text) + "\n";
    }
  }
  return out;
}

void save_corpus(const CorpusSplit& split, const fs::path& corpus_path, const fs::path& tables_dir) {
  if (corpus_path.has_parent_path()) fs::create_directories(corpus_path.parent_path());
  std::ofstream out(corpus_path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + corpus_path.string() + "'");
  out << format_corpus_tsv(split);
  for (const auto& [id, table] : split.tables) save_table_csv(table, tables_dir / id);
}

std::pair<CorpusSplit, CorpusSplit> split_dev(const CorpusSplit& train, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split_dev: fraction must be in (0, 1)");
  std::vector<std::string> ids;
  {
    std::set<std::string> used;
    for (const auto& s : train.sequences) used.insert(s.table_id);
    ids.assign(used.begin(), used.end());
  }
  if (ids.size() < 2) throw ValidationError("split_dev: need at least 2 distinct tables, got " + std::to_string(ids.size()));
  std::mt19937_64 rng(seed);
  // Fisher-Yates with our own index draws keeps the order stable across
  // standard library implementations.
  for (size_t i = ids.size() - 1; i > 0; --i) {
    size_t j = rng() % (i + 1);
    std::swap(ids[i], ids[j]);
  }
  size_t n_dev = static_cast<size_t>(fraction * static_cast<double>(ids.size()) + 0.5);
  n_dev = std::clamp<size_t>(n_dev, 1, ids.size() - 1);
  std::set<std::string> dev_ids(ids.begin(), ids.begin() + n_dev);
  std::set<std::string> train_ids(ids.begin() + n_dev, ids.end());
  return {subset_by_tables(train, train_ids, train.name), subset_by_tables(train, dev_ids, "dev")};
}

std::pair<CorpusSplit, CorpusSplit> split_by_table_hash(const CorpusSplit& corpus, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test fraction must be in (0, 1)");
  std::set<std::string> train_ids, test_ids;
  for (const auto& s : corpus.sequences) {
    double u = static_cast<double>(fnv1a(s.table_id) % 1000000) / 1e6;
    (u < test_fraction ? test_ids : train_ids).insert(s.table_id);
  }
  return {subset_by_tables(corpus, train_ids, "train"), subset_by_tables(corpus, test_ids, "test")};
}

}  // namespace seqtab
