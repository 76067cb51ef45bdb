#include <gtest/gtest.h>

#include "seqtab/text.hpp"

using namespace seqtab::text;

TEST(Text, NormalizeWhitespace) {
  EXPECT_EQ(normalize_ws("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(normalize_ws(""), "");
  EXPECT_EQ(normalize_ws("   "), "");
  EXPECT_EQ(normalize_ws("Keep Case"), "Keep Case");
}

TEST(Text, TokenizeLowercasesAndSplits) {
  EXPECT_EQ(tokenize("What are ALL of the teams?"),
            (std::vector<std::string>{"what", "are", "all", "of", "the", "teams"}));
  EXPECT_EQ(tokenize("won 1,200 medals in 1996"), (std::vector<std::string>{"won", "1", "200", "medals", "in", "1996"}));
  EXPECT_TRUE(tokenize("?!,").empty());
}

TEST(Text, TokenizeKeepsUtf8Words) {
  auto toks = tokenize("São Paulo");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[0], "s\xc3\xa3o");
}

TEST(Text, ParseNumber) {
  EXPECT_DOUBLE_EQ(*parse_number("1,234"), 1234);
  EXPECT_DOUBLE_EQ(*parse_number(" $3.50 "), 3.5);
  EXPECT_DOUBLE_EQ(*parse_number("-7"), -7);
  EXPECT_FALSE(parse_number("abc").has_value());
  EXPECT_FALSE(parse_number("").has_value());
  EXPECT_FALSE(parse_number("12 apples").has_value());
}

TEST(Text, ParseDateFormats) {
  EXPECT_EQ(*parse_date("2001-03-04"), 20010304);
  EXPECT_EQ(*parse_date("2001/03/04"), 20010304);
  EXPECT_EQ(*parse_date("March 4, 2001"), 20010304);
  EXPECT_EQ(*parse_date("4 March 2001"), 20010304);
  EXPECT_EQ(*parse_date("Mar 2001"), 20010300);
  EXPECT_FALSE(parse_date("yesterday").has_value());
  EXPECT_FALSE(parse_date("2001-13-04").has_value());
}

TEST(Text, DatesOrderChronologically) {
  EXPECT_LT(*parse_date("December 31, 1999"), *parse_date("January 1, 2000"));
  EXPECT_LT(*parse_date("March 2001"), *parse_date("March 1, 2001"));
}

TEST(Text, ParseYear) {
  EXPECT_EQ(*parse_year("1960"), 1960);
  EXPECT_FALSE(parse_year("960").has_value());
  EXPECT_FALSE(parse_year("3100").has_value());
}

TEST(Text, Utf8RoundTrip) {
  const std::string s = "a\xc3\xa9\xe2\x82\xac\xf0\x9f\x98\x80";
  auto cps = utf8_codepoints(s);
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1], U'é');
  EXPECT_EQ(cps[3], U'\U0001F600');
  std::string back;
  for (char32_t c : cps) back += utf8_encode(c);
  EXPECT_EQ(back, s);
}

TEST(Text, MalformedUtf8BecomesReplacement) {
  auto cps = utf8_codepoints("a\xff" "b");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1], U'�');
}

TEST(Text, Join) {
  EXPECT_EQ(join({"a", "b", "c"}, ", "), "a, b, c");
  EXPECT_EQ(join({}, ","), "");
}
