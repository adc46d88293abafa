#include "tcs/metrics.hpp"

#include <vector>

#include "tcs/text.hpp"

namespace tcs {

double time_saved_minutes(std::size_t source_words, std::size_t summary_words) {
  if (summary_words > source_words)
    throw Error(Errc::NegativeSaving, "summary has " + std::to_string(summary_words) +
                                          " words, source only " + std::to_string(source_words));
  return static_cast<double>(source_words - summary_words) / kReadingWordsPerMinute;
}

ErrorCount residual_errors(std::string_view candidate, std::string_view reference) {
  if (reference.empty()) throw Error(Errc::InvalidArgument, "empty reference text");
  const auto a = text::words(candidate);
  const auto b = text::words(reference);

  // Two-row Levenshtein over word sequences.
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return {prev[b.size()]};
}

}  // namespace tcs
