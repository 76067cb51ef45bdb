#include "seqtab/text.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace seqtab::text {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_token_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december"};

std::optional<int> parse_month(std::string_view word) {
  std::string w = to_lower_ascii(word);
  if (!w.empty() && w.back() == '.') w.pop_back();
  if (w.size() < 3) return std::nullopt;
  for (size_t i = 0; i < kMonths.size(); ++i) {
    if (w == kMonths[i] || (w.size() <= kMonths[i].size() && kMonths[i].substr(0, w.size()) == w &&
                            (w.size() == 3 || (i == 8 && w == "sept")))) {
      return static_cast<int>(i) + 1;
    }
  }
  return std::nullopt;
}

std::optional<int> parse_uint(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

std::optional<int> make_date(int y, int m, int d) {
  if (y < 1000 || y > 2999 || m < 1 || m > 12 || d < 0 || d > 31) return std::nullopt;
  return y * 10000 + m * 100 + d;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (is_space(s[i]) || s[i] == ',')) ++i;
    size_t j = i;
    while (j < s.size() && !is_space(s[j]) && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : s) {
    if (is_token_byte(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::optional<double> parse_number(std::string_view s) {
  std::string cleaned;
  cleaned.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    unsigned char c = s[i];
    if (c == ',' || c == '$' || is_space(c)) continue;
    // UTF-8 currency signs: € (E2 82 AC), £ (C2 A3), ¥ (C2 A5)
    if (c == 0xE2 && i + 2 < s.size() && (unsigned char)s[i + 1] == 0x82 && (unsigned char)s[i + 2] == 0xAC) {
      i += 2;
      continue;
    }
    if (c == 0xC2 && i + 1 < s.size() && ((unsigned char)s[i + 1] == 0xA3 || (unsigned char)s[i + 1] == 0xA5)) {
      i += 1;
      continue;
    }
    cleaned.push_back(static_cast<char>(c));
  }
  if (cleaned.empty()) return std::nullopt;
  const char* begin = cleaned.data();
  const char* end = cleaned.data() + cleaned.size();
  if (*begin == '+') ++begin;
  if (begin == end) return std::nullopt;
  // from_chars would accept "inf"/"nan"; require a digit somewhere.
  bool has_digit = false;
  for (const char* p = begin; p != end; ++p) {
    if (std::isdigit(static_cast<unsigned char>(*p))) has_digit = true;
    else if (*p != '.' && *p != '-' && *p != 'e' && *p != 'E') return std::nullopt;
  }
  if (!has_digit) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<int> parse_year(std::string_view s) {
  std::string t = normalize_ws(s);
  if (t.size() != 4) return std::nullopt;
  auto y = parse_uint(t);
  if (!y || *y < 1000 || *y > 2999) return std::nullopt;
  return y;
}

std::optional<int> parse_date(std::string_view s) {
  std::string t = normalize_ws(s);
  if (t.empty()) return std::nullopt;

  // yyyy-mm-dd or yyyy/mm/dd
  if (t.size() == 10 && (t[4] == '-' || t[4] == '/') && t[7] == t[4]) {
    auto y = parse_uint(std::string_view(t).substr(0, 4));
    auto m = parse_uint(std::string_view(t).substr(5, 2));
    auto d = parse_uint(std::string_view(t).substr(8, 2));
    if (y && m && d && *d >= 1) return make_date(*y, *m, *d);
    return std::nullopt;
  }

  auto words = split_words(t);
  if (words.size() == 3) {
    // Month D, YYYY
    if (auto m = parse_month(words[0])) {
      auto d = parse_uint(words[1]);
      auto y = parse_uint(words[2]);
      if (d && y && *d >= 1) return make_date(*y, *m, *d);
    }
    // D Month YYYY
    if (auto m = parse_month(words[1])) {
      auto d = parse_uint(words[0]);
      auto y = parse_uint(words[2]);
      if (d && y && *d >= 1) return make_date(*y, *m, *d);
    }
  } else if (words.size() == 2) {
    if (auto m = parse_month(words[0])) {
      auto y = parse_uint(words[1]);
      if (y) return make_date(*y, *m, 0);
    }
  }
  return std::nullopt;
}

std::vector<char32_t> utf8_codepoints(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    int extra = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + extra >= s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      unsigned char cc = s[i + k];
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace seqtab::text
