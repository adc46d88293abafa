#include "tcs/pipelines.hpp"

#include <algorithm>

#include "tcs/corpus.hpp"
#include "tcs/text.hpp"

namespace tcs {
namespace {

// Scans a template, calling on_text for literal runs and on_name for
// placeholders.
template <typename OnText, typename OnName>
void scan(std::string_view tmpl, OnText on_text, OnName on_name) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const char c = tmpl[i];
    if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      on_text("{");
      i += 2;
    } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      on_text("}");
      i += 2;
    } else if (c == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close == std::string_view::npos)
        throw Error(Errc::InvalidArgument, "unterminated placeholder in template");
      on_name(tmpl.substr(i + 1, close - i - 1));
      i = close + 1;
    } else if (c == '}') {
      throw Error(Errc::InvalidArgument, "stray '}' in template");
    } else {
      const auto next = tmpl.find_first_of("{}", i);
      const auto end = next == std::string_view::npos ? tmpl.size() : next;
      on_text(tmpl.substr(i, end - i));
      i = end;
    }
  }
}

}  // namespace

std::string render(std::string_view tmpl, const Bindings& bindings) {
  std::string out;
  scan(
      tmpl, [&](std::string_view s) { out.append(s); },
      [&](std::string_view name) {
        auto it = bindings.find(name);
        if (it == bindings.end())
          throw Error(Errc::InvalidArgument, "unbound placeholder {" + std::string(name) + "}");
        out.append(it->second);
      });
  return out;
}

std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  scan(
      tmpl, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
      });
  return names;
}

const PromptTemplate& correction_template() {
  static const PromptTemplate t{"You are a language expert. Please correct the following email:",
                                "{input}"};
  return t;
}

const PromptTemplate& summary_template() {
  static const PromptTemplate t{
      "You are a helpful assistant. Summarize the following text in exactly {num_words}.", "{input}"};
  return t;
}

const PromptTemplate& qa_template() {
  static const PromptTemplate t{
      "\n"
      "Answer the user questions in detail and explain all the necessary solution\n"
      "steps. If the context doesn't contain any relevant information to answer the\n"
      "question, just say \"I don't know\":\n"
      "\n"
      "<context>\n"
      "{context}\n"
      "</context>\n",
      "{input}"};
  return t;
}

std::string words_phrase(std::size_t n) { return std::to_string(n) + " words"; }

bool is_refusal(std::string_view text) { return text::trim(text) == kRefusal; }

std::string correct_email(Provider& provider, std::string_view email_text, std::optional<std::string> key) {
  if (email_text.empty()) throw Error(Errc::InvalidArgument, "email text is empty");
  const auto& t = correction_template();
  const Bindings b{{"input", std::string(email_text)}};
  ChatRequest req;
  req.system = render(t.system, b);
  req.user = render(t.user, b);
  req.model = provider.config().chat_model;
  req.key = std::move(key);
  return provider.chat(req).text;
}

SummaryResult summarize(Provider& provider, std::string_view source_text, std::size_t target_words,
                        std::optional<std::string> key) {
  if (target_words < 1) throw Error(Errc::InvalidArgument, "target_words must be >= 1");
  if (source_text.empty()) throw Error(Errc::InvalidArgument, "source text is empty");
  const auto& t = summary_template();
  const Bindings b{{"num_words", words_phrase(target_words)}, {"input", std::string(source_text)}};
  ChatRequest req;
  req.system = render(t.system, b);
  req.user = render(t.user, b);
  req.model = provider.config().summary_model;
  req.key = std::move(key);

  SummaryResult result;
  result.summary = provider.chat(req).text;
  result.target_words = target_words;
  result.actual_words = text_stats(result.summary).words;
  const std::vector<std::string> texts{std::string(source_text), result.summary};
  const auto vecs = provider.embed(texts);
  result.similarity = cosine_similarity(vecs[0], vecs[1]);
  return result;
}

Answer answer_question(Provider& provider, const VectorStore& store, std::string_view question,
                       std::size_t k, std::optional<std::string> key) {
  if (question.empty()) throw Error(Errc::InvalidArgument, "question is empty");
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (store.empty()) throw Error(Errc::EmptyStore, "store has no chunks");

  Answer answer;
  answer.question = std::string(question);
  const auto query = provider.embed_one(answer.question);
  answer.retrieved = store.search(query, k);

  std::string context;
  for (const auto& hit : answer.retrieved) {
    if (!context.empty()) context += "\n\n";
    context += hit.chunk.text;
  }
  const auto& t = qa_template();
  const Bindings b{{"context", context}, {"input", answer.question}};
  ChatRequest req;
  req.system = render(t.system, b);
  req.user = render(t.user, b);
  req.model = provider.config().chat_model;
  req.key = std::move(key);

  answer.system_message = req.system;
  answer.text = provider.chat(req).text;
  answer.is_refusal = is_refusal(answer.text);
  return answer;
}

}  // namespace tcs
