#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcs {

enum class Role { Customer, Agent };

struct Message {
  Role role = Role::Customer;
  std::string text;

  friend bool operator==(const Message&, const Message&) = default;
};

/// One customer request with its message thread and an optional
/// hand-written reply email.
struct Inquiry {
  std::string id;
  std::string topic;
  std::string request;
  std::vector<Message> messages;
  std::optional<std::string> reply_gold;

  friend bool operator==(const Inquiry&, const Inquiry&) = default;
};

struct Corpus {
  std::vector<Inquiry> inquiries;

  const Inquiry* find(std::string_view id) const;
  std::size_t size() const { return inquiries.size(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct TextStats {
  std::size_t words = 0;
  std::size_t chars = 0;

  friend bool operator==(const TextStats&, const TextStats&) = default;
};

/// Words are maximal non-whitespace runs; chars are Unicode scalar values.
TextStats text_stats(std::string_view text);

/// Request followed by each message text, joined by a blank line.
std::string full_thread_text(const Inquiry& inquiry);

/// Parses line-delimited JSON records. Blank lines are skipped. Unknown keys
/// are reported through `warnings` when given, otherwise to stderr.
///
/// Throws Error with MalformedRecord (message names the 1-based line),
/// DuplicateId or Io.
Corpus load_corpus(const std::filesystem::path& path,
                   std::vector<std::string>* warnings = nullptr);

/// Same as load_corpus, reading from an in-memory buffer.
Corpus parse_corpus(std::string_view jsonl, std::vector<std::string>* warnings = nullptr);

std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace tcs
