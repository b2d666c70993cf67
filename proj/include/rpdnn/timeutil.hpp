// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rpdnn {

/// UTC instant in milliseconds since the Unix epoch.
struct Timestamp {
  std::int64_t millis = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr std::int64_t kMillisPerMinute = 60'000;
inline constexpr std::int64_t kMillisPerDay = 86'400'000;

/// Parses an RFC 3339 date-time ("2015-01-07T11:06:08Z",
/// "2015-01-07T11:06:08.250+01:00"). Fractional digits beyond milliseconds
/// are truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SS[.mmm]Z"; the fraction appears only when
/// non-zero so whole-second inputs round-trip textually.
std::string format_rfc3339(Timestamp ts);

}  // namespace rpdnn
