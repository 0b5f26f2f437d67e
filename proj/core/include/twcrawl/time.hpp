#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace twcrawl {

using Millis = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Millis>;

// "Sat Sep 07 20:15:03 +0000 2019", the Search API's created_at layout.
std::string format_api_time(Timestamp t);
std::optional<Timestamp> parse_api_time(std::string_view s);

// "2019-09-07T20:15:03Z" (milliseconds appended as ".123" when non-zero).
std::string format_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view s);

inline std::int64_t to_epoch_ms(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_epoch_ms(std::int64_t ms) { return Timestamp{Millis{ms}}; }

}  // namespace twcrawl
