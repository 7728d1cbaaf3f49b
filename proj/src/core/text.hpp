#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ppg {

/// Decodes UTF-8 into code points. Malformed sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view text);

std::string utf8_encode(char32_t cp);
std::string utf8_encode(std::u32string_view text);

/// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// Substring by code point offset and count (clamped to the end).
std::string utf8_substr(std::string_view text, std::size_t start, std::size_t count);

/// Characters permitted in identifiers: a..z, A..Z, а..я, А..Я, 0..9, _.
bool is_identifier_char(char32_t c);
bool is_identifier_start(char32_t c);

/// Lookup key for identifiers, keywords and builtin names.
///
/// Folds case for Latin and Cyrillic letters and maps the Latin capitals that
/// are visually identical to Cyrillic ones (A B C E H K M O P T X) onto their
/// Cyrillic counterparts, so `B` and `В` name the same variable.
std::string name_key(std::string_view name);

/// Locale-independent shortest round-trip rendering of a double.
/// Always fixed notation; integral values carry no decimal point.
std::string format_shortest(double v);

/// Fixed notation with exactly `digits` fractional digits; "-0" collapses to "0".
std::string format_fixed(double v, int digits);

}  // namespace ppg
