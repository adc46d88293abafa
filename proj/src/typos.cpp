#include "tcs/typos.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "tcs/error.hpp"
#include "tcs/text.hpp"

namespace tcs {
namespace {

// Unbiased draw in [0, n) from raw engine output. std::uniform_int_distribution
// is implementation-defined, so it cannot be used for cross-platform output.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

void validate(const TypoSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0))
    throw Error(Errc::InvalidArgument, "typo rate must lie in [0, 1]");
  if (spec.kinds.empty()) throw Error(Errc::InvalidArgument, "no typo kinds given");
}

}  // namespace

std::string_view to_string(TypoKind kind) {
  return kind == TypoKind::Transposition ? "transposition" : "deletion";
}

TypoKind parse_typo_kind(std::string_view name) {
  if (name == "transposition") return TypoKind::Transposition;
  if (name == "deletion") return TypoKind::Deletion;
  throw Error(Errc::InvalidArgument, "unknown typo kind '" + std::string(name) + "'");
}

std::string apply_typo(std::string_view word, TypoKind kind, std::size_t position) {
  std::u32string w = text::decode(word);
  const std::size_t len = w.size();
  if (kind == TypoKind::Transposition) {
    if (len < 4 || position < 1 || position > len - 3)
      throw Error(Errc::InvalidArgument, "transposition position out of interior range");
    std::swap(w[position], w[position + 1]);
  } else {
    if (len < 3 || position < 1 || position > len - 2)
      throw Error(Errc::InvalidArgument, "deletion position out of interior range");
    w.erase(position, 1);
  }
  return text::encode(w);
}

std::string inject_typos(std::string_view text, const TypoSpec& spec, std::size_t& mutated_words) {
  validate(spec);
  mutated_words = 0;
  const auto spans = text::word_spans(text);

  std::vector<std::size_t> eligible;
  std::vector<std::size_t> lengths(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    lengths[i] = text::scalar_count(text.substr(spans[i].begin, spans[i].end - spans[i].begin));
    if (lengths[i] >= kMinTypoWordLength) eligible.push_back(i);
  }
  const auto target = static_cast<std::size_t>(
      std::ceil(spec.rate * static_cast<double>(eligible.size())));
  if (target == 0) return std::string(text);

  std::mt19937_64 rng(spec.seed);
  // Partial Fisher-Yates: the first `target` entries become the selection.
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j = i + draw_below(rng, eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }

  std::vector<std::string> replacement(spans.size());
  std::vector<bool> replaced(spans.size(), false);
  for (std::size_t s = 0; s < target; ++s) {
    const std::size_t idx = eligible[s];
    const std::size_t len = lengths[idx];
    const TypoKind kind = spec.kinds[draw_below(rng, spec.kinds.size())];
    // Transposition positions 1..len-3, deletion positions 1..len-2.
    const std::size_t choices = kind == TypoKind::Transposition ? len - 3 : len - 2;
    const std::size_t position = 1 + draw_below(rng, choices);
    const auto& sp = spans[idx];
    replacement[idx] = apply_typo(text.substr(sp.begin, sp.end - sp.begin), kind, position);
    replaced[idx] = true;
  }
  mutated_words = target;

  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    out.append(text.substr(cursor, spans[i].begin - cursor));
    if (replaced[i]) {
      out.append(replacement[i]);
    } else {
      out.append(text.substr(spans[i].begin, spans[i].end - spans[i].begin));
    }
    cursor = spans[i].end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string inject_typos(std::string_view text, const TypoSpec& spec) {
  std::size_t ignored = 0;
  return inject_typos(text, spec, ignored);
}

}  // namespace tcs
