#include "tcs/corpus.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tcs/error.hpp"
#include "tcs/text.hpp"

namespace tcs {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": " + why);
}

std::string required_text(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(line, std::string("missing key '") + key + "'");
  if (!it->is_string()) malformed(line, std::string("'") + key + "' must be a string");
  return text::trim(it->get<std::string>());
}

Inquiry parse_record(const json& obj, std::size_t line, std::vector<std::string>* warnings) {
  if (!obj.is_object()) malformed(line, "record is not an object");

  Inquiry inq;
  inq.id = required_text(obj, "id", line);
  if (inq.id.empty()) malformed(line, "empty id");
  inq.topic = required_text(obj, "topic", line);
  inq.request = required_text(obj, "request", line);
  if (inq.request.empty()) malformed(line, "empty request");

  auto msgs = obj.find("messages");
  if (msgs == obj.end() || !msgs->is_array()) malformed(line, "'messages' must be an array");
  for (const auto& m : *msgs) {
    if (!m.is_object()) malformed(line, "message is not an object");
    const std::string role = required_text(m, "role", line);
    Message msg;
    if (role == "customer") {
      msg.role = Role::Customer;
    } else if (role == "agent") {
      msg.role = Role::Agent;
    } else {
      malformed(line, "unknown role '" + role + "'");
    }
    msg.text = required_text(m, "text", line);
    if (msg.text.empty()) malformed(line, "empty message text");
    inq.messages.push_back(std::move(msg));
  }

  if (auto gold = obj.find("reply_gold"); gold != obj.end() && !gold->is_null()) {
    if (!gold->is_string()) malformed(line, "'reply_gold' must be a string");
    std::string g = text::trim(gold->get<std::string>());
    if (!g.empty()) inq.reply_gold = std::move(g);
  }

  static const std::set<std::string> kKnown = {"id", "topic", "request", "messages", "reply_gold"};
  for (const auto& [key, _] : obj.items()) {
    if (kKnown.count(key)) continue;
    std::string msg = "line " + std::to_string(line) + ": ignoring unknown key '" + key + "'";
    if (warnings) {
      warnings->push_back(std::move(msg));
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  }
  return inq;
}

}  // namespace

const Inquiry* Corpus::find(std::string_view id) const {
  for (const auto& inq : inquiries)
    if (inq.id == id) return &inq;
  return nullptr;
}

TextStats text_stats(std::string_view text) {
  return {text::word_count(text), text::scalar_count(text)};
}

std::string full_thread_text(const Inquiry& inquiry) {
  std::string out = inquiry.request;
  for (const auto& m : inquiry.messages) {
    out += "\n\n";
    out += m.text;
  }
  return out;
}

Corpus parse_corpus(std::string_view jsonl, std::vector<std::string>* warnings) {
  Corpus corpus;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    std::string_view line = jsonl.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (text::word_count(line) == 0) continue;

    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) malformed(line_no, "invalid JSON");
    Inquiry inq = parse_record(obj, line_no, warnings);
    if (!seen.insert(inq.id).second) throw Error(Errc::DuplicateId, inq.id);
    corpus.inquiries.push_back(std::move(inq));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::Io, "read failed: " + path.string());
  return parse_corpus(buf.str(), warnings);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& inq : corpus.inquiries) {
    json obj = json::object();
    obj["id"] = inq.id;
    obj["topic"] = inq.topic;
    obj["request"] = inq.request;
    json msgs = json::array();
    for (const auto& m : inq.messages)
      msgs.push_back({{"role", m.role == Role::Customer ? "customer" : "agent"}, {"text", m.text}});
    obj["messages"] = std::move(msgs);
    if (inq.reply_gold) obj["reply_gold"] = *inq.reply_gold;
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << serialize_corpus(corpus);
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

}  // namespace tcs
