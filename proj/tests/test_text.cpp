#include <catch2/catch_amalgamated.hpp>

#include "hopforge/text.hpp"

using namespace hopforge;

TEST_CASE("tokenize lowercases and splits on punctuation") {
  CHECK(text::tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
  CHECK(text::tokenize("") == std::vector<std::string>{});
  CHECK(text::tokenize("  a1-b2 ") == std::vector<std::string>{"a1", "b2"});
}

TEST_CASE("tokenize keeps UTF-8 words intact") {
  auto toks = text::tokenize("caf\xc3\xa9 Z\xc3\xbcrich");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0] == "caf\xc3\xa9");
  CHECK(toks[1] == "z\xc3\xbcrich");  // ASCII prefix folds, the rest stays
}

TEST_CASE("utf8 scalar offsets") {
  std::string s = "a\xc3\xa9jm";  // a, e-acute, j, m
  CHECK(text::utf8_scalar_count(s) == 4);
  CHECK(text::utf8_byte_of_scalar(s, 0) == 0);
  CHECK(text::utf8_byte_of_scalar(s, 1) == 1);
  CHECK(text::utf8_byte_of_scalar(s, 2) == 3);
  CHECK(text::utf8_byte_of_scalar(s, 4) == s.size());
  CHECK(text::utf8_byte_of_scalar(s, 5) == std::string_view::npos);
  CHECK(*text::slice_scalars(s, 1, 3) == "\xc3\xa9j");
  CHECK_FALSE(text::slice_scalars(s, 3, 9).has_value());
}

TEST_CASE("case-insensitive find and removal") {
  CHECK(text::find_ci("The Largest Planet", "largest") == 4);
  CHECK(text::contains_ci("Jupiter is big", "JUPITER"));
  CHECK_FALSE(text::contains_ci("Jupiter", ""));
  CHECK(text::remove_all_ci("Jupiter is Jupiter", "jupiter") == " is ");
}

TEST_CASE("removal keeps deleting occurrences formed across boundaries") {
  // deleting the middle occurrence re-forms the needle
  CHECK(text::remove_all_ci("TiTitletle", "Title") == "");
  CHECK(text::remove_all_ci("aaa", "aa") == "a");
}

TEST_CASE("whole-word counting") {
  CHECK(text::count_word("what is what", "what") == 2);
  CHECK(text::count_word("whatever what.", "what") == 1);
  CHECK(text::count_word("What", "what") == 0);  // case-sensitive
  CHECK(text::count_word("somewhat", "what") == 0);
}

TEST_CASE("whitespace collapse") {
  CHECK(text::collapse_ws("  a   b \t c  ") == "a b c");
  CHECK(text::collapse_ws("") == "");
  CHECK(text::collapse_ws(" \t ") == "");
}

TEST_CASE("collapse with span mapping") {
  auto m = text::collapse_ws_mapped("x   MID y", 4, 7);
  CHECK(m.text == "x MID y");
  CHECK(m.text.substr(m.begin, m.end - m.begin) == "MID");

  auto lead = text::collapse_ws_mapped("   MID after", 3, 6);
  CHECK(lead.text == "MID after");
  CHECK(lead.text.substr(lead.begin, lead.end - lead.begin) == "MID");

  auto tail = text::collapse_ws_mapped("before MID   ", 7, 10);
  CHECK(tail.text == "before MID");
  CHECK(tail.text.substr(tail.begin, tail.end - tail.begin) == "MID");
}

TEST_CASE("ws token spans cover tokens exactly") {
  std::string s = " one  two ";
  auto spans = text::ws_token_spans(s);
  REQUIRE(spans.size() == 2);
  CHECK(s.substr(spans[0].first, spans[0].second - spans[0].first) == "one");
  CHECK(s.substr(spans[1].first, spans[1].second - spans[1].first) == "two");
}

TEST_CASE("token hash is stable") {
  // frozen values guard against accidental hash changes, which would
  // silently invalidate every params and index file
  CHECK(text::token_hash("hopforge", 0) == text::token_hash("hopforge", 0));
  CHECK(text::token_hash("hopforge", 1) != text::token_hash("hopforge", 2));
  CHECK(bytes::fnv1a64("") == 14695981039346656037ull);
  CHECK(bytes::fnv1a64("a") == 12638187200555641996ull);
}
