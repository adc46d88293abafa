#include "tcs/provider.hpp"

#include <fstream>

#include "json.hpp"
#include "tcs/text.hpp"

namespace tcs {
namespace {

std::string truncate_words(const std::string& text, std::size_t n) {
  const auto spans = text::word_spans(text);
  if (n == 0) return {};
  if (spans.size() <= n) return text;
  return text.substr(0, spans[n - 1].end);
}

std::string apply_fixes(const std::string& text, const std::map<std::string, std::string>& fixes) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& sp : text::word_spans(text)) {
    out.append(text, cursor, sp.begin - cursor);
    const std::string word = text.substr(sp.begin, sp.end - sp.begin);
    auto it = fixes.find(word);
    out.append(it == fixes.end() ? word : it->second);
    cursor = sp.end;
  }
  out.append(text, cursor);
  return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

EmbeddingVector mock_embed(std::string_view text, std::size_t dim) {
  if (dim < 2) throw Error(Errc::InvalidArgument, "mock_embed needs dim >= 2");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& word : text::words(text::ascii_lower(text))) {
    const std::uint64_t h = fnv1a64(word);
    const auto idx = static_cast<Eigen::Index>(h % dim);
    acc[idx] += (h >> 63) ? -1.0 : 1.0;
  }
  const double norm = acc.norm();
  if (norm == 0.0) {
    acc.setZero();
    acc[0] = 1.0;
  } else {
    acc /= norm;
  }
  return {acc.cast<float>(), std::string(kMockEmbedTag)};
}

MockProvider::MockProvider(MockChatMode mode, ProviderConfig config)
    : Provider(std::move(config)), mode_(std::move(mode)) {
  if (config_.embed_dim < 2) throw Error(Errc::InvalidArgument, "mock embedder needs embed_dim >= 2");
  config_.embed_model = std::string(kMockEmbedTag);
}

ChatResponse MockProvider::chat(const ChatRequest& request) {
  if (request.user.empty()) throw Error(Errc::InvalidArgument, "empty user message");
  if (request.temperature < 0) throw Error(Errc::InvalidArgument, "negative temperature");

  ChatResponse resp;
  resp.model = request.model.empty() ? "mock" : request.model;
  resp.text = std::visit(
      [&](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, EchoMode>) {
          return request.user;
        } else if constexpr (std::is_same_v<M, TruncateMode>) {
          return truncate_words(request.user, m.words);
        } else if constexpr (std::is_same_v<M, CannedMode>) {
          if (request.key) {
            if (auto it = m.responses.find(*request.key); it != m.responses.end()) return it->second;
          }
          if (auto it = m.responses.find(request.user); it != m.responses.end()) return it->second;
          throw Error(Errc::MalformedResponse,
                      "no canned response for key '" + request.key.value_or("<none>") + "'");
        } else {
          return apply_fixes(request.user, m.fixes);
        }
      },
      mode_);
  resp.usage.prompt_tokens = text::word_count(request.system) + text::word_count(request.user);
  resp.usage.completion_tokens = text::word_count(resp.text);
  return resp;
}

std::string MockProvider::describe() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, EchoMode>) {
          return "mock:echo";
        } else if constexpr (std::is_same_v<M, TruncateMode>) {
          return "mock:truncate:" + std::to_string(m.words);
        } else if constexpr (std::is_same_v<M, CannedMode>) {
          return "mock:canned(" + std::to_string(m.responses.size()) + ")";
        } else {
          return "mock:dict(" + std::to_string(m.fixes.size()) + ")";
        }
      },
      mode_);
}

std::vector<EmbeddingVector> MockProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(mock_embed(t, config_.embed_dim));
  return out;
}

CannedMode MockProvider::load_canned(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  CannedMode canned;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::word_count(line) == 0) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("key") || !obj.contains("text") ||
        !obj["key"].is_string() || !obj["text"].is_string())
      throw Error(Errc::MalformedRecord, path + ":" + std::to_string(line_no) +
                                             ": expected {\"key\": string, \"text\": string}");
    canned.responses[obj["key"].get<std::string>()] = obj["text"].get<std::string>();
  }
  return canned;
}

}  // namespace tcs
