#include "tcs/text.hpp"

#include <algorithm>

namespace tcs::text {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one scalar starting at pos; returns the scalar and advances pos.
char32_t next_scalar(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += len;
  return cp;
}

}  // namespace

bool is_white_space(char32_t c) noexcept {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t pos = 0;
  while (pos < utf8.size()) out.push_back(next_scalar(utf8, pos));
  return out;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

std::string encode(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size());
  for (char32_t c : scalars) append_utf8(out, c);
  return out;
}

std::size_t scalar_count(std::string_view utf8) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    next_scalar(utf8, pos);
    ++n;
  }
  return n;
}

std::vector<std::size_t> scalar_boundaries(std::string_view utf8) {
  std::vector<std::size_t> out;
  out.reserve(utf8.size() + 1);
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    out.push_back(pos);
    next_scalar(utf8, pos);
  }
  out.push_back(utf8.size());
  return out;
}

std::vector<ByteSpan> word_spans(std::string_view utf8) {
  std::vector<ByteSpan> spans;
  std::size_t pos = 0;
  bool in_word = false;
  std::size_t start = 0;
  while (pos < utf8.size()) {
    const std::size_t here = pos;
    const bool ws = is_white_space(next_scalar(utf8, pos));
    if (!ws && !in_word) {
      in_word = true;
      start = here;
    } else if (ws && in_word) {
      in_word = false;
      spans.push_back({start, here});
    }
  }
  if (in_word) spans.push_back({start, utf8.size()});
  return spans;
}

std::vector<std::string> words(std::string_view utf8) {
  std::vector<std::string> out;
  for (const auto& s : word_spans(utf8)) out.emplace_back(utf8.substr(s.begin, s.end - s.begin));
  return out;
}

std::size_t word_count(std::string_view utf8) { return word_spans(utf8).size(); }

std::string trim(std::string_view utf8) {
  const auto spans = word_spans(utf8);
  if (spans.empty()) return {};
  return std::string(utf8.substr(spans.front().begin, spans.back().end - spans.front().begin));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

}  // namespace tcs::text
