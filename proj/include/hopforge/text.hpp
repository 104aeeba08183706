#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hopforge/bytes.hpp"

// Text primitives shared by the whole pipeline. Tokenization, hashing, case
// folding and offset arithmetic are pinned here once so that the feature
// hasher, the sparse index and the generation pipeline can never drift apart.
//
// Conventions, fixed for reproducibility:
//   - case folding is ASCII-only; non-ASCII bytes are never case-mapped
//   - a token is a maximal run of [a-z0-9] (after folding) or bytes >= 0x80,
//     so UTF-8 words survive intact and punctuation splits
//   - hyperlink character offsets count Unicode scalar values, not bytes

namespace hopforge::text {

inline bool is_ws(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline char lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower_ascii(c);
  return out;
}

/// Lowercased tokens, split on whitespace and punctuation.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (is_token_char(static_cast<unsigned char>(ch))) {
      cur.push_back(lower_ascii(ch));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Whitespace-delimited token byte spans (start, end), punctuation kept.
inline std::vector<std::pair<std::size_t, std::size_t>> ws_token_spans(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ws(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t b = i;
    while (i < s.size() && !is_ws(static_cast<unsigned char>(s[i]))) ++i;
    out.emplace_back(b, i);
  }
  return out;
}

inline std::size_t ws_token_count(std::string_view s) { return ws_token_spans(s).size(); }

/// Stable seeded token hash backing the feature hasher: FNV-1a 64 with the
/// seed folded into the offset basis.
inline std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
  return bytes::fnv1a64(token, seed);
}

// ---- Unicode scalar offsets -------------------------------------------------

inline std::size_t utf8_scalar_count(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xc0) != 0x80) ++n;
  return n;
}

/// Byte offset of the k-th scalar; s.size() when k equals the scalar count;
/// npos when k is out of range.
inline std::size_t utf8_byte_of_scalar(std::string_view s, std::size_t k) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xc0) != 0x80) {
      if (seen == k) return i;
      ++seen;
    }
  }
  return seen == k ? s.size() : std::string_view::npos;
}

/// Slice by scalar range [a, b). nullopt when the range is invalid.
inline std::optional<std::string_view> slice_scalars(std::string_view s, std::size_t a, std::size_t b) {
  if (a > b) return std::nullopt;
  std::size_t ba = utf8_byte_of_scalar(s, a);
  std::size_t bb = utf8_byte_of_scalar(s, b);
  if (ba == std::string_view::npos || bb == std::string_view::npos) return std::nullopt;
  return s.substr(ba, bb - ba);
}

// ---- Case-insensitive search (ASCII fold) -----------------------------------

inline std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from = 0) {
  if (needle.empty() || needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    std::size_t j = 0;
    while (j < needle.size() && lower_ascii(hay[i + j]) == lower_ascii(needle[j])) ++j;
    if (j == needle.size()) return i;
  }
  return std::string_view::npos;
}

inline bool contains_ci(std::string_view hay, std::string_view needle) {
  return find_ci(hay, needle) != std::string_view::npos;
}

/// Deletes every case-insensitive occurrence of `needle`. Passes repeat until
/// stable so occurrences formed across deletion boundaries are removed too.
inline std::string remove_all_ci(std::string_view s, std::string_view needle) {
  if (needle.empty()) return std::string(s);
  std::string cur(s);
  for (;;) {
    std::string next;
    next.reserve(cur.size());
    std::size_t i = 0;
    bool removed = false;
    while (i < cur.size()) {
      std::size_t hit = find_ci(cur, needle, i);
      if (hit == std::string_view::npos) {
        next.append(cur, i, cur.size() - i);
        break;
      }
      next.append(cur, i, hit - i);
      i = hit + needle.size();
      removed = true;
    }
    if (!removed) return cur;
    cur = std::move(next);
  }
}

/// Case-sensitive whole-word occurrence count; word boundaries are
/// non-token characters.
inline std::size_t count_word(std::string_view s, std::string_view word) {
  if (word.empty()) return 0;
  std::size_t n = 0;
  std::size_t i = 0;
  while ((i = s.find(word, i)) != std::string_view::npos) {
    bool left_ok = i == 0 || !is_token_char(static_cast<unsigned char>(s[i - 1]));
    std::size_t after = i + word.size();
    bool right_ok = after == s.size() || !is_token_char(static_cast<unsigned char>(s[after]));
    if (left_ok && right_ok) ++n;
    ++i;
  }
  return n;
}

// ---- Whitespace collapse ----------------------------------------------------

inline std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_ws(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending = true;
    } else {
      if (pending) {
        out.push_back(' ');
        pending = false;
      }
      out.push_back(c);
    }
  }
  return out;
}

struct MappedCollapse {
  std::string text;
  std::size_t begin = 0;  // tracked byte span, remapped into `text`
  std::size_t end = 0;
};

/// collapse_ws that carries a byte span through the rewrite. Needed so the
/// spliced bridge region stays addressable after question normalization.
inline MappedCollapse collapse_ws_mapped(std::string_view s, std::size_t begin, std::size_t end) {
  MappedCollapse out;
  bool pending = false;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == begin) out.begin = out.text.size() + (pending ? 1 : 0);
    if (i == end) out.end = out.text.size();
    if (i == s.size()) break;
    char c = s[i];
    if (is_ws(static_cast<unsigned char>(c))) {
      if (!out.text.empty()) pending = true;
    } else {
      if (pending) {
        out.text.push_back(' ');
        pending = false;
      }
      out.text.push_back(c);
    }
  }
  if (out.end < out.begin) out.end = out.begin;
  return out;
}

}  // namespace hopforge::text
