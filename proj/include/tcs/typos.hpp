#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tcs {

enum class TypoKind : std::uint8_t {
  Transposition,  // swap two adjacent interior characters
  Deletion,       // drop one interior character
};

struct TypoSpec {
  double rate = 0.15;
  std::uint64_t seed = 42;
  std::vector<TypoKind> kinds{TypoKind::Transposition, TypoKind::Deletion};
};

/// Name of the generator recorded in reports.
inline constexpr std::string_view kTypoRngName = "mt19937_64";

/// Words shorter than this many characters are never mutated.
inline constexpr std::size_t kMinTypoWordLength = 4;

/// Applies one typo to a single word. `position` is a character index:
/// transposition swaps [position] and [position + 1] and needs
/// 1 <= position <= len - 3; deletion removes [position] and needs
/// 1 <= position <= len - 2. Throws InvalidArgument otherwise.
std::string apply_typo(std::string_view word, TypoKind kind, std::size_t position);

/// Deterministic typo injection. ceil(rate * eligible) distinct eligible
/// words (length >= 4) are chosen with a seeded mt19937_64; each gets one
/// typo of a uniformly drawn kind at a uniformly drawn interior position.
/// Whitespace is preserved byte for byte.
std::string inject_typos(std::string_view text, const TypoSpec& spec);

/// Same as inject_typos, also reporting how many words were selected.
std::string inject_typos(std::string_view text, const TypoSpec& spec, std::size_t& mutated_words);

std::string_view to_string(TypoKind kind);
TypoKind parse_typo_kind(std::string_view name);

}  // namespace tcs
