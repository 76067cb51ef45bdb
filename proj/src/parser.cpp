#include "seqtab/parser.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "seqtab/lexicon.hpp"
#include "seqtab/text.hpp"

namespace seqtab {

namespace {

constexpr double kCueWeight = 0.5;

bool is_number_token(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string singular(std::string t) {
  if (t.size() <= 3 || is_number_token(t)) return t;
  if (t.size() > 4 && t.ends_with("ies")) return t.substr(0, t.size() - 3) + "y";
  if (t.ends_with("ss") || t.ends_with("us") || t.ends_with("is")) return t;
  if (t.ends_with("s")) return t.substr(0, t.size() - 1);
  return t;
}

void add_tokens(std::set<std::string>& out, std::string_view s) {
  for (auto& t : match_tokens(s)) out.insert(std::move(t));
}

size_t overlap(const std::set<std::string>& q, const std::set<std::string>& ref) {
  size_t n = 0;
  for (const auto& t : ref) n += q.count(t);
  return n;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double signed_cue(bool wanted) { return wanted ? kCueWeight : -kCueWeight; }

struct Ranked {
  Candidate cand;
  size_t order = 0;
};

bool better(const Ranked& a, const Ranked& b) {
  if (a.cand.score != b.cand.score) return a.cand.score > b.cand.score;
  bool ae = !a.cand.denotation, be = !b.cand.denotation;
  if (ae != be) return !ae;
  if (!ae && a.cand.denotation->size() != b.cand.denotation->size()) {
    return a.cand.denotation->size() < b.cand.denotation->size();
  }
  int ac = primary_column(a.cand.form), bc = primary_column(b.cand.form);
  if (ac != bc) return ac < bc;
  return a.order < b.order;
}

}  // namespace

std::vector<std::string> match_tokens(std::string_view s) {
  auto toks = text::tokenize(s);
  for (auto& t : toks) t = singular(std::move(t));
  return toks;
}

std::vector<std::string> question_numbers(std::string_view q) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < q.size()) {
    if (!std::isdigit(static_cast<unsigned char>(q[i]))) {
      ++i;
      continue;
    }
    // Do not start inside a word ("r2d2").
    if (i > 0 && std::isalpha(static_cast<unsigned char>(q[i - 1]))) {
      while (i < q.size() && std::isalnum(static_cast<unsigned char>(q[i]))) ++i;
      continue;
    }
    size_t j = i;
    while (j < q.size() && (std::isdigit(static_cast<unsigned char>(q[j])) ||
                            ((q[j] == ',' || q[j] == '.') && j + 1 < q.size() &&
                             std::isdigit(static_cast<unsigned char>(q[j + 1]))))) {
      ++j;
    }
    std::string num(q.substr(i, j - i));
    num.erase(std::remove(num.begin(), num.end(), ','), num.end());
    if (std::find(out.begin(), out.end(), num) == out.end()) out.push_back(num);
    i = j;
  }
  return out;
}

ScoringCues scoring_cues(std::string_view question) {
  ScoringCues cues;
  auto toks = text::tokenize(question);
  std::set<std::string> s(toks.begin(), toks.end());
  auto any = [&](std::initializer_list<const char*> words) {
    return std::any_of(words.begin(), words.end(), [&](const char* w) { return s.count(w) > 0; });
  };
  cues.wants_max = any({"most", "highest"});
  cues.wants_min = any({"least", "lowest"});
  cues.wants_greater = any({"more", "greater", "over", "above", "after"});
  cues.wants_less = any({"less", "fewer", "under", "below", "before"});
  cues.referential = ReferentialLexicon::defaults().matches(question);
  return cues;
}

double score_form(const LogicalForm& form, const Table& table, const std::set<std::string>& q,
                  const ScoringCues& cues) {
  std::set<std::string> ref;
  double cue = 0;
  std::visit(Overloaded{
                 [&](const SelectColumn& f) { add_tokens(ref, table.header(f.col)); },
                 [&](const Filter& f) {
                   add_tokens(ref, table.header(f.col));
                   add_tokens(ref, f.value);
                   if (f.op == CompareOp::kGt) cue += signed_cue(cues.wants_greater);
                   if (f.op == CompareOp::kLt) cue += signed_cue(cues.wants_less);
                 },
                 [&](const ArgExtreme& f) {
                   add_tokens(ref, table.header(f.col));
                   add_tokens(ref, table.header(f.project_col));
                   cue += signed_cue(f.extreme == Extreme::kMax ? cues.wants_max : cues.wants_min);
                 },
                 [&](const ProjectRows& f) { add_tokens(ref, table.header(f.col)); },
             },
             form);
  if (scope_of(form) == Scope::kPreviousRows) cue += signed_cue(cues.referential);
  return (static_cast<double>(overlap(q, ref)) + cue) / (1.0 + static_cast<double>(q.size()));
}

CandidateSet generate_candidates(const std::string& question, const Table& table, const AnswerCoordinates* previous,
                                 size_t beam_limit, std::optional<size_t> cap) {
  const auto q_list = match_tokens(question);
  const std::set<std::string> q(q_list.begin(), q_list.end());
  const ScoringCues cues = scoring_cues(question);
  const bool has_prev = previous && !previous->empty();
  const auto numbers = question_numbers(question);

  std::vector<LogicalForm> forms;
  for (int c = 0; c < table.cols(); ++c) forms.push_back(SelectColumn{c});

  std::vector<Scope> scopes = {Scope::kWholeTable};
  if (has_prev) scopes.push_back(Scope::kPreviousRows);
  std::vector<int> prev_rows;
  if (has_prev) {
    auto rs = previous->rows();
    prev_rows.assign(rs.begin(), rs.end());
  }

  for (Scope scope : scopes) {
    std::vector<int> rows;
    if (scope == Scope::kWholeTable) {
      rows.resize(table.rows());
      std::iota(rows.begin(), rows.end(), 0);
    } else {
      rows = prev_rows;
    }
    for (int c = 0; c < table.cols(); ++c) {
      // Equality filters on cell strings that the question mentions.
      std::set<std::string> seen;
      for (int r : rows) {
        std::string v = text::normalize_ws(table.cell(r, c));
        if (v.empty() || !seen.insert(v).second) continue;
        auto vt = match_tokens(v);
        if (vt.empty()) continue;
        if (std::all_of(vt.begin(), vt.end(), [&](const std::string& t) { return q.count(t) > 0; })) {
          forms.push_back(Filter{scope, c, CompareOp::kEq, v});
        }
      }
      const auto kind = table.kind(c);
      if (kind == ColumnKind::kNumber || kind == ColumnKind::kDate) {
        for (const auto& n : numbers) {
          if (!compare_key(n, kind)) continue;
          forms.push_back(Filter{scope, c, CompareOp::kGt, n});
          forms.push_back(Filter{scope, c, CompareOp::kLt, n});
        }
        for (Extreme e : {Extreme::kMax, Extreme::kMin}) {
          for (int p = 0; p < table.cols(); ++p) forms.push_back(ArgExtreme{scope, c, e, p});
        }
      }
      if (scope == Scope::kPreviousRows) forms.push_back(ProjectRows{scope, c});
    }
  }

  std::vector<Ranked> ranked;
  ranked.reserve(forms.size());
  for (size_t i = 0; i < forms.size(); ++i) {
    Candidate cand{forms[i], score_form(forms[i], table, q, cues), execute(forms[i], table, previous)};
    if (cap && cand.denotation && cand.denotation->size() > *cap) continue;
    ranked.push_back({std::move(cand), i});
  }
  std::stable_sort(ranked.begin(), ranked.end(), better);
  if (ranked.size() > beam_limit) ranked.resize(beam_limit);

  CandidateSet out;
  out.beam_limit = beam_limit;
  out.denotation_size_cap = cap;
  out.candidates.reserve(ranked.size());
  for (auto& r : ranked) out.candidates.push_back(std::move(r.cand));
  return out;
}

ParseResult parse(const CandidateSet& set, const std::string& question, const Table& table) {
  for (const auto& c : set.candidates) {
    if (c.denotation) return {*c.denotation, c.form};
  }
  const auto q_list = match_tokens(question);
  const std::set<std::string> q(q_list.begin(), q_list.end());
  const auto cues = scoring_cues(question);
  int best = 0;
  double best_score = -1e300;
  for (int c = 0; c < table.cols(); ++c) {
    double s = score_form(SelectColumn{c}, table, q, cues);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return {table.column_cells(best), SelectColumn{best}};
}

ParseResult parse(const std::string& question, const Table& table, const AnswerCoordinates* previous,
                  size_t beam_limit, std::optional<size_t> cap) {
  return parse(generate_candidates(question, table, previous, beam_limit, cap), question, table);
}

AnswerCoordinates parse_and_answer(const std::string& question, const Table& table,
                                   const AnswerCoordinates* previous) {
  return parse(question, table, previous).answer;
}

}  // namespace seqtab
