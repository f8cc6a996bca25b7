#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules. All ASCII-only case folding;
// bytes >= 0x80 pass through untouched.
namespace tvf::text {

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;
[[nodiscard]] std::string to_lower(std::string_view s);
[[nodiscard]] std::string collapse_whitespace(std::string_view s);
[[nodiscard]] bool is_blank(std::string_view s) noexcept;

// Number of UTF-8 code points (continuation bytes are not counted).
[[nodiscard]] std::size_t utf8_length(std::string_view s) noexcept;

[[nodiscard]] std::vector<std::string_view> split(std::string_view s, std::string_view sep);
[[nodiscard]] std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Case-folded, whitespace-collapsed form with trailing sentence punctuation removed.
[[nodiscard]] std::string normalize_sentence(std::string_view s);

// Lowercased alphanumeric runs; used by the mock NLI and the text-overlap metrics.
[[nodiscard]] std::vector<std::string> alnum_tokens(std::string_view s);

[[nodiscard]] bool starts_with(std::string_view s, std::string_view prefix) noexcept;

} // namespace tvf::text
