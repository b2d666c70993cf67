// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace rpdnn {
namespace {

const icu::Normalizer2& nfkd() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKDInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
      throw std::runtime_error("ICU NFKD normalizer unavailable");
    }
    return n;
  }();
  return *instance;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }
bool is_word(UChar32 c) { return c == '_' || u_isalnum(c) != 0; }

std::u32string to_u32(const icu::UnicodeString& s) {
  std::u32string out;
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

std::string to_utf8(std::u32string_view s) {
  icu::UnicodeString u;
  for (char32_t c : s) u.append(static_cast<UChar32>(c));
  std::string out;
  u.toUTF8String(out);
  return out;
}

bool starts_with_at(const std::u32string& s, std::size_t pos, std::u32string_view prefix) {
  return s.compare(pos, prefix.size(), prefix) == 0;
}

// Drops URL and @-mention spans, replacing nothing (the surrounding
// whitespace already separates tokens).
std::u32string strip_urls_and_mentions(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (starts_with_at(s, i, U"http://") || starts_with_at(s, i, U"https://")) {
      while (i < s.size() && !is_space(static_cast<UChar32>(s[i]))) ++i;
      continue;
    }
    if (s[i] == U'@' && i + 1 < s.size() && is_word(static_cast<UChar32>(s[i + 1]))) {
      ++i;
      while (i < s.size() && is_word(static_cast<UChar32>(s[i]))) ++i;
      continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

}  // namespace

TokenizedText preprocess_text(std::string_view raw) {
  TokenizedText result;
  const auto input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  result.original_length = static_cast<std::size_t>(input.countChar32());

  icu::UnicodeString lowered(input);
  lowered.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString decomposed = nfkd().normalize(lowered, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");

  std::u32string plain;
  for (char32_t c : to_u32(decomposed)) {
    if (u_charType(static_cast<UChar32>(c)) != U_NON_SPACING_MARK) plain.push_back(c);
  }
  const std::u32string cleaned = strip_urls_and_mentions(plain);

  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space(static_cast<UChar32>(cleaned[i]))) ++i;
    std::size_t end = i;
    while (end < cleaned.size() && !is_space(static_cast<UChar32>(cleaned[end]))) ++end;
    std::size_t lo = i, hi = end;
    while (lo < hi && u_isalnum(static_cast<UChar32>(cleaned[lo])) == 0) ++lo;
    while (hi > lo && u_isalnum(static_cast<UChar32>(cleaned[hi - 1])) == 0) --hi;
    if (hi > lo) {
      result.tokens.push_back(to_utf8(std::u32string_view(cleaned).substr(lo, hi - lo)));
    }
    i = end;
  }
  return result;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view raw) {
  const auto u = to_u32(icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size()))));
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < u.size()) {
    while (i < u.size() && is_space(static_cast<UChar32>(u[i]))) ++i;
    std::size_t end = i;
    while (end < u.size() && !is_space(static_cast<UChar32>(u[end]))) ++end;
    if (end > i) out.push_back(to_utf8(std::u32string_view(u).substr(i, end - i)));
    i = end;
  }
  return out;
}

std::size_t codepoint_length(std::string_view utf8) {
  return static_cast<std::size_t>(
      icu::UnicodeString::fromUTF8(
          icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())))
          .countChar32());
}

}  // namespace rpdnn
