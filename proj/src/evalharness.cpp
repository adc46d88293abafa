#include "tcs/evalharness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tcs/text.hpp"

namespace tcs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(0..n-1) on up to `workers` threads. Results must be written to
// per-index slots by fn; the first exception is rethrown after all finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!first) first = std::current_exception();
          }
        }
      });
    }
  }
  if (first) std::rethrow_exception(first);
}

void describe_provider(EvalReport& r, const Provider& p) {
  const auto& c = p.config();
  r.metadata["provider"] = p.describe();
  r.metadata["chat_model"] = c.chat_model;
  r.metadata["summary_model"] = c.summary_model;
  r.metadata["embed_model"] = c.embed_model;
  r.metadata["embed_dim"] = std::to_string(c.embed_dim);
  r.metadata["temperature"] = "0";
  r.metadata["max_retries"] = std::to_string(c.max_retries);
}

void describe_store(EvalReport& r, const VectorStore& s) {
  r.metadata["chunk_size"] = std::to_string(s.chunk_params().size);
  r.metadata["chunk_overlap"] = std::to_string(s.chunk_params().overlap);
  r.metadata["store_chunks"] = std::to_string(s.size());
}

std::string join(std::span<const std::size_t> xs) {
  std::string out;
  for (auto x : xs) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

Cell count_cell(std::size_t n) { return static_cast<std::int64_t>(n); }

void check_relevant(const VectorStore& store, std::span<const Query> queries) {
  const auto ids = store.inquiry_ids();
  const std::set<std::string> known(ids.begin(), ids.end());
  for (const auto& q : queries)
    if (!known.count(q.relevant))
      throw Error(Errc::InvalidArgument, "query '" + q.id + "' names unknown inquiry '" + q.relevant + "'");
}

}  // namespace

std::vector<Query> parse_queries(std::string_view jsonl) {
  std::vector<Query> out;
  std::map<std::string, int> seen;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    const auto line = jsonl.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (text::word_count(line) == 0) continue;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    auto bad = [&](const std::string& why) {
      return Error(Errc::MalformedRecord, "query line " + std::to_string(line_no) + ": " + why);
    };
    if (obj.is_discarded() || !obj.is_object()) throw bad("invalid JSON object");
    if (!obj.contains("question") || !obj["question"].is_string()) throw bad("missing 'question'");
    if (!obj.contains("relevant") || !obj["relevant"].is_string()) throw bad("missing 'relevant'");
    Query q;
    q.question = text::trim(obj["question"].get<std::string>());
    q.relevant = text::trim(obj["relevant"].get<std::string>());
    if (q.question.empty() || q.relevant.empty()) throw bad("empty question or relevant id");
    std::string id = q.relevant;
    if (auto it = obj.find("id"); it != obj.end() && it->is_string() && !text::trim(it->get<std::string>()).empty())
      id = text::trim(it->get<std::string>());
    const int n = ++seen[id];
    q.id = n == 1 ? id : id + "#" + std::to_string(n);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Query> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_queries(buf.str());
}

EvalReport eval_correction(const Corpus& corpus, const TypoSpec& spec, Provider& provider) {
  for (const auto& inq : corpus.inquiries)
    if (!inq.reply_gold) throw Error(Errc::MissingGold, inq.id);

  EvalReport report;
  report.name = "correction";
  report.columns = {"Uncorrected Words", "Uncorrected Chars", "Uncorrected Errors",
                    "Corrected Words",   "Corrected Chars",   "Corrected Errors"};
  describe_provider(report, provider);
  report.metadata["seed"] = std::to_string(spec.seed);
  report.metadata["typo_rng"] = std::string(kTypoRngName);
  report.metadata["typo_rate"] = std::to_string(spec.rate);
  std::string kinds;
  for (auto k : spec.kinds) kinds += (kinds.empty() ? "" : ",") + std::string(to_string(k));
  report.metadata["typo_kinds"] = kinds;

  std::vector<std::vector<Cell>> rows(corpus.size());
  parallel_for(corpus.size(), provider.config().max_in_flight, [&](std::size_t i) {
    const auto& inq = corpus.inquiries[i];
    const std::string& gold = *inq.reply_gold;
    const std::string typoed = inject_typos(gold, spec);
    const auto before = text_stats(typoed);
    auto& cells = rows[i];
    cells = {count_cell(before.words), count_cell(before.chars),
             count_cell(residual_errors(typoed, gold).errors)};
    try {
      const std::string fixed = correct_email(provider, typoed, inq.id);
      const auto after = text_stats(fixed);
      cells.push_back(count_cell(after.words));
      cells.push_back(count_cell(after.chars));
      cells.push_back(count_cell(residual_errors(fixed, gold).errors));
    } catch (const Error& e) {
      for (int j = 0; j < 3; ++j) cells.push_back(CellError{e.what()});
    }
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) report.add_row(corpus.inquiries[i].id, std::move(rows[i]));
  return report;
}

EvalReport eval_summarization(const Corpus& corpus, std::span<const std::size_t> targets,
                              Provider& provider) {
  if (targets.empty()) throw Error(Errc::InvalidParams, "no summary targets");
  for (auto t : targets)
    if (t < 1) throw Error(Errc::InvalidParams, "summary target must be >= 1");

  EvalReport report;
  report.name = "summarization";
  report.columns = {"Words"};
  for (auto t : targets) report.columns.push_back("Summary " + std::to_string(t));
  for (auto t : targets) report.columns.push_back("Similarity " + std::to_string(t));
  for (auto t : targets) report.columns.push_back("Time Saved " + std::to_string(t));
  describe_provider(report, provider);
  report.metadata["targets"] = join(targets);
  report.metadata["words_per_minute"] = "238";

  const std::size_t nt = targets.size();
  const std::size_t cells_total = corpus.size() * nt;
  std::vector<std::vector<Cell>> rows(corpus.size(), std::vector<Cell>(1 + 3 * nt));
  std::vector<std::size_t> source_words(corpus.size());
  std::vector<std::string> sources(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    sources[i] = full_thread_text(corpus.inquiries[i]);
    source_words[i] = text_stats(sources[i]).words;
    rows[i][0] = count_cell(source_words[i]);
  }

  parallel_for(cells_total, provider.config().max_in_flight, [&](std::size_t cell) {
    const std::size_t i = cell / nt;
    const std::size_t t = cell % nt;
    auto& row = rows[i];
    try {
      const std::string key = corpus.inquiries[i].id + "/" + std::to_string(targets[t]);
      const auto result = summarize(provider, sources[i], targets[t], key);
      row[1 + t] = count_cell(result.actual_words);
      row[1 + nt + t] = result.similarity;
      try {
        row[1 + 2 * nt + t] = time_saved_minutes(source_words[i], result.actual_words);
      } catch (const Error& e) {
        row[1 + 2 * nt + t] = CellError{e.what()};
      }
    } catch (const Error& e) {
      row[1 + t] = row[1 + nt + t] = row[1 + 2 * nt + t] = CellError{e.what()};
    }
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) report.add_row(corpus.inquiries[i].id, std::move(rows[i]));
  return report;
}

std::vector<RelevanceResult> eval_retrieval(const VectorStore& store, std::span<const Query> queries,
                                            std::span<const std::size_t> ks, Provider& embedder) {
  if (ks.empty()) throw Error(Errc::InvalidParams, "no k values");
  for (auto k : ks)
    if (k < 1) throw Error(Errc::InvalidParams, "k must be >= 1");
  if (store.empty()) throw Error(Errc::EmptyStore, "store has no chunks");
  if (queries.empty()) throw Error(Errc::InvalidArgument, "no queries");
  check_relevant(store, queries);

  std::vector<std::string> questions;
  for (const auto& q : queries) questions.push_back(q.question);
  const auto vectors = embedder.embed(questions);

  const std::size_t kmax = *std::max_element(ks.begin(), ks.end());
  std::vector<std::vector<SearchHit>> hits;
  for (const auto& v : vectors) hits.push_back(store.search(v, kmax));

  std::vector<RelevanceResult> out;
  for (auto k : ks) {
    double sum = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const std::size_t n = std::min(k, hits[q].size());
      std::size_t relevant = 0;
      for (std::size_t r = 0; r < n; ++r) relevant += hits[q][r].chunk.inquiry_id == queries[q].relevant;
      sum += static_cast<double>(relevant) / static_cast<double>(n);
    }
    out.push_back({k, sum / static_cast<double>(queries.size())});
  }
  return out;
}

EvalReport retrieval_report(std::span<const RelevanceResult> results) {
  EvalReport report;
  report.name = "retrieval";
  report.key_column = "Chunks Returned";
  report.columns = {"Proportion Relevant"};
  for (const auto& r : results) report.add_row(std::to_string(r.k), {r.proportion});
  return report;
}

QaColumnFlags column_flags(const DistanceMatrix& m, std::size_t column) {
  QaColumnFlags f;
  f.query_id = m.query_ids.at(column);
  const std::string& rel = m.relevant.at(f.query_id);
  f.relevant_distance = kNaN;
  f.nearest_irrelevant = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < m.inquiry_ids.size(); ++r) {
    const double d = m.cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(column));
    if (m.inquiry_ids[r] == rel) {
      f.relevant_distance = d;
    } else if (!(d >= f.nearest_irrelevant)) {
      f.nearest_irrelevant = d;
    }
  }
  if (std::isinf(f.nearest_irrelevant)) f.nearest_irrelevant = kNaN;
  f.margin = f.nearest_irrelevant - f.relevant_distance;
  // NaN compares false, so failed columns are never flagged.
  f.relevant_is_min = f.relevant_distance < f.nearest_irrelevant ||
                      (m.inquiry_ids.size() == 1 && std::isfinite(f.relevant_distance));
  return f;
}

QaResult eval_qa(const VectorStore& store, std::span<const Query> queries, Provider& provider,
                 std::size_t k) {
  if (store.empty()) throw Error(Errc::EmptyStore, "store has no chunks");
  if (k < 1) throw Error(Errc::InvalidParams, "k must be >= 1");
  check_relevant(store, queries);

  QaResult result;
  auto& m = result.matrix;
  m.inquiry_ids = store.inquiry_ids();
  for (const auto& q : queries) {
    m.query_ids.push_back(q.id);
    m.relevant[q.id] = q.relevant;
  }
  const auto rows = static_cast<Eigen::Index>(m.inquiry_ids.size());
  m.cells = Eigen::MatrixXd::Constant(rows, static_cast<Eigen::Index>(queries.size()), kNaN);
  std::vector<std::string> errors(queries.size());

  parallel_for(queries.size(), provider.config().max_in_flight, [&](std::size_t c) {
    try {
      const auto answer = answer_question(provider, store, queries[c].question, k, queries[c].id);
      const auto vec = provider.embed_one(answer.text);
      const auto nearest = store.nearest_per_inquiry(vec.values);
      for (Eigen::Index r = 0; r < rows; ++r)
        m.cells(r, static_cast<Eigen::Index>(c)) = nearest.at(m.inquiry_ids[static_cast<std::size_t>(r)]);
    } catch (const Error& e) {
      errors[c] = e.what();
    }
  });

  auto& dist = result.distances;
  dist.name = "qa";
  dist.key_column = "Historic Inquiry";
  dist.columns = m.query_ids;
  describe_provider(dist, provider);
  describe_store(dist, store);
  dist.metadata["k"] = std::to_string(k);
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::vector<Cell> cells;
    for (Eigen::Index c = 0; c < m.cells.cols(); ++c) cells.push_back(m.cells(r, c));
    dist.add_row(m.inquiry_ids[static_cast<std::size_t>(r)], std::move(cells));
  }

  auto& sum = result.summary;
  sum.name = "qa_flags";
  sum.key_column = "Query";
  sum.columns = {"Relevant", "Relevant Distance", "Nearest Irrelevant", "Margin", "Relevant=Min"};
  sum.metadata = dist.metadata;
  for (std::size_t c = 0; c < queries.size(); ++c) {
    auto f = column_flags(m, c);
    std::vector<Cell> cells{queries[c].relevant, f.relevant_distance, f.nearest_irrelevant, f.margin,
                            std::string(f.relevant_is_min ? "yes" : "no")};
    if (!errors[c].empty()) cells.back() = CellError{errors[c]};
    sum.add_row(f.query_id, std::move(cells));
    result.flags.push_back(std::move(f));
  }
  return result;
}

double column_mean(const EvalReport& report, std::string_view column) {
  const std::size_t c = report.column_index(column);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [_, cells] : report.rows) {
    if (const double* d = std::get_if<double>(&cells[c]); d && std::isfinite(*d)) {
      sum += *d;
      ++n;
    } else if (const auto* i = std::get_if<std::int64_t>(&cells[c])) {
      sum += static_cast<double>(*i);
      ++n;
    }
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

}  // namespace tcs
