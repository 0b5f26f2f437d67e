#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

// RFC 4180 style CSV: fields containing comma, quote, CR or LF are quoted,
// embedded quotes doubled. Rows end with "\n".
namespace twcrawl::csv {

std::string quote_field(std::string_view field);
std::string format_row(std::span<const std::string> fields);

// Throws ParseError (1-based line) on an unterminated quote or stray
// characters after a closing quote. A trailing newline does not produce an
// empty row.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace twcrawl::csv
