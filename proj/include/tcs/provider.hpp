#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tcs/metrics.hpp"

namespace tcs {

struct ChatRequest {
  std::string system;
  std::string user;
  std::string model;
  double temperature = 0.0;
  std::optional<std::size_t> max_tokens;
  /// Lookup key for canned mock responses; never sent over the wire.
  std::optional<std::string> key;
};

struct Usage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  std::string model;
  Usage usage;
};

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "LLM_API_KEY";
  std::string chat_model = "gpt-3.5-turbo-0125";
  std::string summary_model = "gpt-4-0125-preview";
  std::string embed_model = "text-embedding-3-small";
  std::size_t embed_dim = 1536;
  std::chrono::milliseconds timeout{60'000};
  std::size_t max_retries = 3;
  std::size_t max_in_flight = 4;
  /// Delay before the first retry; doubles on each further retry.
  std::chrono::duration<double> retry_base{1.0};

  void validate() const;
};

inline constexpr std::size_t kEmbedBatchSize = 64;

/// Chat + embedding backend. Instances are shared across threads; all
/// public methods are safe to call concurrently.
class Provider {
 public:
  explicit Provider(ProviderConfig config);
  virtual ~Provider() = default;

  Provider(const Provider&) = delete;
  Provider& operator=(const Provider&) = delete;

  virtual ChatResponse chat(const ChatRequest& request) = 0;

  /// One vector per text, order preserved. Texts are sent in batches of at
  /// most kEmbedBatchSize with at most max_in_flight batches running.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts);
  EmbeddingVector embed_one(const std::string& text);

  const ProviderConfig& config() const { return config_; }
  std::size_t embed_dim() const { return config_.embed_dim; }

  /// Short label for report metadata, e.g. "mock:echo".
  virtual std::string describe() const = 0;

 protected:
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;

  ProviderConfig config_;
};

// ---------------------------------------------------------------------------
// Offline mock backend.

struct EchoMode {};
struct TruncateMode {
  std::size_t words = 0;
};
/// Responses looked up by ChatRequest::key, falling back to the user text.
struct CannedMode {
  std::map<std::string, std::string> responses;
};
/// Echo with word-for-word replacement of known misspellings.
struct DictionaryFixMode {
  std::map<std::string, std::string> fixes;
};

using MockChatMode = std::variant<EchoMode, TruncateMode, CannedMode, DictionaryFixMode>;

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Feature-hashing embedding: ASCII-lowercased words hashed with FNV-1a 64;
/// each adds +-1 at (hash mod dim), negative when bit 63 is set. The result
/// is unit length; an all-zero accumulator yields e0. Requires dim >= 2.
EmbeddingVector mock_embed(std::string_view text, std::size_t dim);

inline constexpr std::string_view kMockEmbedTag = "mock-fnv1a-hash";

/// config().embed_model is replaced by kMockEmbedTag.
class MockProvider final : public Provider {
 public:
  MockProvider(MockChatMode mode, ProviderConfig config = {});

  ChatResponse chat(const ChatRequest& request) override;
  std::string describe() const override;

  /// Reads a canned table from line-delimited {"key": ..., "text": ...}.
  static CannedMode load_canned(const std::string& path);

 protected:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  MockChatMode mode_;
};

// ---------------------------------------------------------------------------
// Wire client for OpenAI-compatible endpoints.

/// k-th retry delay (k >= 1): base * 2^(k-1) * (1 + 0.5 * jitter), with
/// jitter in [0, 1].
std::chrono::duration<double> backoff_delay(std::size_t retry, std::chrono::duration<double> base,
                                            double jitter);

class RemoteProvider final : public Provider {
 public:
  using SleepHook = std::function<void(std::chrono::duration<double>)>;

  explicit RemoteProvider(ProviderConfig config, std::uint64_t jitter_seed = 0x5eed);
  ~RemoteProvider() override;

  ChatResponse chat(const ChatRequest& request) override;
  std::string describe() const override;

  /// Replaces std::this_thread::sleep_for between retries.
  void set_sleep_hook(SleepHook hook);

 protected:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tcs
