#pragma once

// UTF-8 helpers shared by every module. A "word" is a maximal run of
// non-whitespace Unicode scalars; whitespace follows the Unicode
// White_Space property. Ill-formed UTF-8 bytes decode to U+FFFD one byte
// at a time so that counting never fails.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tcs::text {

/// A half-open byte range [begin, end) into a UTF-8 string.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_white_space(char32_t c) noexcept;

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view scalars);
void append_utf8(std::string& out, char32_t c);

std::size_t scalar_count(std::string_view utf8);

/// Byte offset of every scalar boundary: size scalar_count + 1, the last
/// entry being utf8.size().
std::vector<std::size_t> scalar_boundaries(std::string_view utf8);

std::vector<ByteSpan> word_spans(std::string_view utf8);
std::vector<std::string> words(std::string_view utf8);
std::size_t word_count(std::string_view utf8);

/// Strips leading and trailing White_Space scalars.
std::string trim(std::string_view utf8);

/// ASCII-only lowercase; non-ASCII bytes pass through.
std::string ascii_lower(std::string_view s);

}  // namespace tcs::text
