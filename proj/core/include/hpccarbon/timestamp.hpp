#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hpccarbon {

/// Instants are seconds since the Unix epoch, UTC.
using UtcSeconds = std::int64_t;

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Parses an RFC 3339 timestamp with an explicit offset, e.g.
/// "2021-03-01T14:00:00+00:00" or "2021-03-01T14:00:00Z".
/// Throws ValidationError on anything else.
UtcSeconds parse_rfc3339(std::string_view text);

/// Renders an instant as "YYYY-MM-DDThh:mm:ss+00:00".
std::string format_rfc3339_utc(UtcSeconds seconds);

/// Validates a plain "YYYY-MM-DD" calendar date; throws ValidationError.
void check_calendar_date(std::string_view text);

/// Floor division, correct for negative numerators.
std::int64_t floor_div(std::int64_t value, std::int64_t divisor);

} // namespace hpccarbon
