#pragma once

#include <span>
#include <string_view>

// Bundled word lists backing the synthetic tweet generator.
namespace twcrawl::corpora {

std::span<const std::string_view> first_names();
std::span<const std::string_view> last_names();
std::span<const std::string_view> locations();
std::span<const std::string_view> languages();
std::span<const std::string_view> words();
std::span<const std::string_view> hashtags();

}  // namespace twcrawl::corpora
