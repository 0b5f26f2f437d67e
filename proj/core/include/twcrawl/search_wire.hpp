#pragma once

#include <string>
#include <string_view>

#include "twcrawl/search_api.hpp"

// HTTP wire format shared by FirehoseServer and HttpSearchEndpoint.
namespace twcrawl::wire {

inline constexpr const char* kKeyHeader = "X-Api-Key";
inline constexpr const char* kSecretHeader = "X-Api-Secret";
// Epoch milliseconds; honoured by servers started in virtual-clock mode.
inline constexpr const char* kVirtualNowHeader = "X-Virtual-Now";
inline constexpr const char* kRemainingHeader = "x-rate-limit-remaining";
// Epoch seconds.
inline constexpr const char* kResetHeader = "x-rate-limit-reset";

// {"statuses":[...],"next":"..."}; rate data travels in headers.
std::string page_body(const ApiPage& page);
// Fills tweets and next only. Throws Error on malformed bodies.
ApiPage parse_page_body(std::string_view body);

std::string rate_status_body(const RateStatus& status);
RateStatus parse_rate_status_body(std::string_view body);

}  // namespace twcrawl::wire
