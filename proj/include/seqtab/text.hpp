#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seqtab::text {

// Trims leading/trailing whitespace and collapses internal runs to a single
// space. No case folding.
std::string normalize_ws(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Lowercased alphanumeric tokens; every non-alphanumeric ASCII byte is a
// separator. Bytes >= 0x80 are kept inside tokens so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view s);

// Decimal number after stripping thousands separators, whitespace and
// currency symbols ($, €, £, ¥).
std::optional<double> parse_number(std::string_view s);

// A calendar date as a sortable ordinal yyyy*10000 + mm*100 + dd. Month-only
// dates use dd = 0. Accepted: 2001-03-04, 2001/03/04, "March 4, 2001",
// "4 March 2001", "March 2001" (month names may be abbreviated).
std::optional<int> parse_date(std::string_view s);

// Bare four-digit year in [1000, 2999].
std::optional<int> parse_year(std::string_view s);

// UTF-8 decoding into code points; malformed bytes decode as U+FFFD.
std::vector<char32_t> utf8_codepoints(std::string_view s);
std::string utf8_encode(char32_t cp);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace seqtab::text
