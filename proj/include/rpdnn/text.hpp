// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rpdnn {

struct TokenizedText {
  std::vector<std::string> tokens;
  /// Length of the raw input in Unicode code points.
  std::size_t original_length = 0;

  friend bool operator==(const TokenizedText&, const TokenizedText&) = default;
};

/// Lowercases, NFKD-decomposes and drops nonspacing marks, removes URLs
/// ("http://" / "https://" through the next whitespace) and @-mentions,
/// splits on whitespace, then trims leading/trailing non-alphanumerics from
/// each token. Tokens that trim to nothing are dropped. Invalid UTF-8 bytes
/// are replaced with U+FFFD before processing.
TokenizedText preprocess_text(std::string_view raw);

/// Joins tokens with single spaces.
std::string join_tokens(const std::vector<std::string>& tokens);

/// Whitespace-separated pieces of the raw text, untouched otherwise.
std::vector<std::string> split_whitespace(std::string_view raw);

/// Number of Unicode code points in a UTF-8 string.
std::size_t codepoint_length(std::string_view utf8);

}  // namespace rpdnn
