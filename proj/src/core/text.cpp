#include "text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace ppg {

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    int extra = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= text.size()) {
        ok = false;
        break;
      }
      auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) out += utf8_encode(c);
  return out;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string utf8_substr(std::string_view text, std::size_t start, std::size_t count) {
  auto cps = utf8_decode(text);
  if (start >= cps.size()) return {};
  return utf8_encode(std::u32string_view(cps).substr(start, count));
}

bool is_identifier_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') ||
         c == U'_' || (c >= U'а' && c <= U'я') || (c >= U'А' && c <= U'Я');
}

bool is_identifier_start(char32_t c) {
  return is_identifier_char(c) && !(c >= U'0' && c <= U'9');
}

namespace {

char32_t fold(char32_t c) {
  if (c >= U'a' && c <= U'z') c = c - U'a' + U'A';
  if (c >= U'а' && c <= U'я') c = c - U'а' + U'А';
  switch (c) {
    case U'A': return U'А';
    case U'B': return U'В';
    case U'C': return U'С';
    case U'E': return U'Е';
    case U'H': return U'Н';
    case U'K': return U'К';
    case U'M': return U'М';
    case U'O': return U'О';
    case U'P': return U'Р';
    case U'T': return U'Т';
    case U'X': return U'Х';
    default: return c;
  }
}

}  // namespace

std::string name_key(std::string_view name) {
  std::u32string cps = utf8_decode(name);
  for (auto& c : cps) c = fold(c);
  return utf8_encode(cps);
}

std::string format_shortest(double v) {
  if (v == 0.0) return "0";
  std::array<char, 400> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double v, int digits) {
  std::array<char, 400> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  if (res.ec != std::errc()) return "nan";
  std::string s(buf.data(), res.ptr);
  if (!s.empty() && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace ppg
