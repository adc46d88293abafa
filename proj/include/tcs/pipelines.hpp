#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcs/provider.hpp"
#include "tcs/vectorstore.hpp"

namespace tcs {

/// A system/user message pair with {name} placeholders. "{{" and "}}"
/// render as literal braces.
struct PromptTemplate {
  std::string system;
  std::string user;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes every {name}; throws InvalidArgument on an unbound or
/// unterminated placeholder.
std::string render(std::string_view tmpl, const Bindings& bindings);

/// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view tmpl);

const PromptTemplate& correction_template();
const PromptTemplate& summary_template();
const PromptTemplate& qa_template();

inline constexpr std::string_view kRefusal = "I don't know";

struct Answer {
  std::string text;
  std::string question;
  std::vector<SearchHit> retrieved;
  bool is_refusal = false;
  /// The rendered system message that was sent.
  std::string system_message;
};

struct SummaryResult {
  std::string summary;
  std::size_t target_words = 0;
  std::size_t actual_words = 0;
  double similarity = 0.0;
};

/// "<n> words", the binding used for the summary length placeholder.
std::string words_phrase(std::size_t n);

std::string correct_email(Provider& provider, std::string_view email_text,
                          std::optional<std::string> key = std::nullopt);

SummaryResult summarize(Provider& provider, std::string_view source_text, std::size_t target_words,
                        std::optional<std::string> key = std::nullopt);

Answer answer_question(Provider& provider, const VectorStore& store, std::string_view question,
                       std::size_t k, std::optional<std::string> key = std::nullopt);

bool is_refusal(std::string_view text);

}  // namespace tcs
