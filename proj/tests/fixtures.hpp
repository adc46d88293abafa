#pragma once

#include <filesystem>
#include <map>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcs/corpus.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return TCS_TEST_DATA_DIR; }

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
}

struct Email {
  std::string id;
  std::string text;
};

inline std::vector<Email> emails() {
  std::vector<Email> out;
  std::istringstream in(read(data_dir() / "emails.jsonl"));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out.push_back({j["id"], j["text"]});
  }
  return out;
}

struct SummaryCountRow {
  std::string inquiry;
  std::size_t source_words;
  std::size_t summary_words[3];
  std::string saved[3];
};

inline std::vector<SummaryCountRow> summary_counts() {
  std::vector<SummaryCountRow> rows;
  std::istringstream in(read(data_dir() / "summary_word_counts.csv"));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    SummaryCountRow r;
    r.inquiry = f[0];
    r.source_words = std::stoul(f[1]);
    for (int i = 0; i < 3; ++i) {
      r.summary_words[i] = std::stoul(f[2 + i]);
      r.saved[i] = f[5 + i];
    }
    rows.push_back(r);
  }
  return rows;
}

/// `n` words drawn from a vocabulary private to `tag`.
inline std::string private_words(const std::string& tag, std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += tag + "w" + std::to_string(rng() % 40);
  }
  return out;
}

/// Inquiries whose threads use pairwise disjoint vocabularies.
inline tcs::Corpus disjoint_corpus(std::size_t inquiries, std::size_t words_each) {
  tcs::Corpus c;
  for (std::size_t i = 0; i < inquiries; ++i) {
    tcs::Inquiry inq;
    inq.id = "Inc" + std::to_string(i + 1);
    inq.topic = "synthetic";
    inq.request = private_words("q" + std::to_string(i), words_each, i + 1);
    inq.messages.push_back({tcs::Role::Agent, private_words("s" + std::to_string(i), words_each, i + 101)});
    c.inquiries.push_back(inq);
  }
  return c;
}

/// One inquiry per fixture row whose thread has exactly source_words words.
inline tcs::Corpus summary_corpus() {
  tcs::Corpus c;
  for (const auto& row : summary_counts()) {
    tcs::Inquiry inq;
    inq.id = row.inquiry;
    inq.topic = "synthetic";
    inq.request = private_words(row.inquiry, row.source_words, row.source_words);
    c.inquiries.push_back(inq);
  }
  return c;
}

inline const std::size_t kSummaryTargets[3] = {100, 200, 500};

/// Canned summaries keyed "<inquiry>/<target>" with the row's word counts.
inline std::map<std::string, std::string> summary_fixtures() {
  std::map<std::string, std::string> out;
  for (const auto& row : summary_counts())
    for (int t = 0; t < 3; ++t)
      out[row.inquiry + "/" + std::to_string(kSummaryTargets[t])] =
          private_words(row.inquiry, row.summary_words[t], row.source_words);
  return out;
}

/// The same table as line-delimited {"key", "text"} records.
inline std::string summary_canned_jsonl() {
  std::string out;
  for (const auto& [k, v] : summary_fixtures()) out += nlohmann::json{{"key", k}, {"text", v}}.dump() + "\n";
  return out;
}

}  // namespace fixtures
