#include "cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcs/corpus.hpp"
#include "tcs/evalharness.hpp"
#include "tcs/pipelines.hpp"
#include "tcs/text.hpp"
#include "tcs/typos.hpp"

namespace tcs::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitProvider = 2;

// Thrown for user-facing failures that are not library errors.
struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixed2(double v) {
  if (!std::isfinite(v)) return "ERR";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<TypoKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<TypoKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_typo_kind(n));
  return kinds;
}

std::map<std::string, std::string> load_dictionary(const std::string& path) {
  const auto obj = nlohmann::json::parse(read_file(path), nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error(Errc::MalformedRecord, path + ": expected a JSON object of word fixes");
  std::map<std::string, std::string> fixes;
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_string()) throw Error(Errc::MalformedRecord, path + ": fix for '" + k + "' is not a string");
    fixes[k] = v.get<std::string>();
  }
  return fixes;
}

// --mock <echo|truncate:N|canned:<path>|dict:<path>|hash-embed>. Every mock
// mode uses the hash embedder; hash-embed alone pairs it with echo chat.
std::unique_ptr<Provider> make_provider(const AppConfig& cfg, const std::string& mock) {
  if (mock.empty()) return std::make_unique<RemoteProvider>(cfg.provider, cfg.seed);
  const auto colon = mock.find(':');
  const std::string kind = mock.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : mock.substr(colon + 1);
  MockChatMode mode;
  if (kind == "echo" || kind == "hash-embed") {
    mode = EchoMode{};
  } else if (kind == "truncate") {
    std::size_t n = 0;
    try {
      n = std::stoul(arg);
    } catch (const std::exception&) {
      throw Failure{kExitInput, "--mock truncate needs a word count, e.g. truncate:100"};
    }
    mode = TruncateMode{n};
  } else if (kind == "canned") {
    if (arg.empty()) throw Failure{kExitInput, "--mock canned needs a file, e.g. canned:answers.jsonl"};
    mode = MockProvider::load_canned(arg);
  } else if (kind == "dict") {
    if (arg.empty()) throw Failure{kExitInput, "--mock dict needs a file, e.g. dict:fixes.json"};
    mode = DictionaryFixMode{load_dictionary(arg)};
  } else {
    throw Failure{kExitInput, "unknown --mock mode '" + mock + "'"};
  }
  return std::make_unique<MockProvider>(std::move(mode), cfg.provider);
}

std::string input_text(const std::string& text, const std::string& file) {
  if (!text.empty() && !file.empty()) throw Failure{kExitInput, "give either --text or --file, not both"};
  if (!file.empty()) return read_file(file);
  if (!text.empty()) return text;
  throw Failure{kExitInput, "missing input: pass --text or --file"};
}

void print_text(std::ostream& out, const std::string& s) {
  out << s;
  if (s.empty() || s.back() != '\n') out << '\n';
}

VectorStore open_store(const AppConfig& cfg) {
  if (!std::filesystem::exists(cfg.store_path))
    throw Failure{kExitInput, "no store at " + cfg.store_path.string() + " (run ingest first)"};
  auto store = VectorStore::load(cfg.store_path, cfg.chunk);
  if (store.empty()) throw Failure{kExitInput, "empty store"};
  return store;
}

}  // namespace

void apply_config_file(AppConfig& c, const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(Errc::MalformedRecord, std::string("config: ") + e.what());
  }
  auto str = [&](const char* key, auto& target) {
    if (auto v = tree.get_optional<std::string>(key)) target = *v;
  };
  auto num = [&](const char* key, auto& target) {
    using T = std::decay_t<decltype(target)>;
    if (auto v = tree.get_optional<std::string>(key)) {
      try {
        target = static_cast<T>(std::stoull(*v));
      } catch (const std::exception&) {
        throw Error(Errc::MalformedRecord, std::string("config: '") + key + "' is not a number");
      }
    }
  };
  auto& p = c.provider;
  str("provider.base_url", p.base_url);
  str("provider.api_key_env", p.api_key_env);
  str("provider.chat_model", p.chat_model);
  str("provider.summary_model", p.summary_model);
  str("provider.embed_model", p.embed_model);
  num("provider.embed_dim", p.embed_dim);
  num("provider.max_retries", p.max_retries);
  num("provider.max_in_flight", p.max_in_flight);
  if (tree.get_optional<std::string>("provider.timeout_ms")) {
    std::uint64_t ms = 0;
    num("provider.timeout_ms", ms);
    p.timeout = std::chrono::milliseconds(ms);
  }
  num("chunk.size", c.chunk.size);
  num("chunk.overlap", c.chunk.overlap);
  if (auto v = tree.get_optional<std::string>("store.path")) c.store_path = *v;
  num("seed", c.seed);
  if (auto v = tree.get_optional<std::string>("output_dir")) c.output_dir = *v;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Technical customer support automation: correction, summarization, RAG Q&A and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  // Global options. Values from flags override the config file, which
  // overrides built-in defaults.
  std::string config_path, mock;
  bool verbose = false;
  AppConfig flags;
  std::uint64_t timeout_ms = 0;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--mock", mock, "Offline backend: echo | truncate:N | canned:<path> | dict:<path> | hash-embed");
  app.add_flag("--verbose,-v", verbose, "Diagnostics on standard error");
  auto* o_seed = app.add_option("--seed", flags.seed, "Random seed (default 42)");
  auto* o_out = app.add_option("--out", flags.output_dir, "Report output directory");
  auto* o_store = app.add_option("--store", flags.store_path, "Vector store file");
  auto* o_base = app.add_option("--base-url", flags.provider.base_url, "OpenAI-compatible API root");
  auto* o_key = app.add_option("--api-key-env", flags.provider.api_key_env, "Environment variable holding the API key");
  auto* o_chat = app.add_option("--chat-model", flags.provider.chat_model, "Model for correction and Q&A");
  auto* o_sum = app.add_option("--summary-model", flags.provider.summary_model, "Model for summaries");
  auto* o_emb = app.add_option("--embed-model", flags.provider.embed_model, "Embedding model");
  auto* o_dim = app.add_option("--embed-dim", flags.provider.embed_dim, "Embedding dimension");
  auto* o_timeout = app.add_option("--timeout-ms", timeout_ms, "Per-request timeout");
  auto* o_retries = app.add_option("--max-retries", flags.provider.max_retries, "Retries on 429/5xx/transport errors");
  auto* o_inflight = app.add_option("--max-in-flight", flags.provider.max_in_flight, "Concurrent provider calls");
  auto* o_csize = app.add_option("--chunk-size", flags.chunk.size, "Chunk length in characters");
  auto* o_coverlap = app.add_option("--chunk-overlap", flags.chunk.overlap, "Characters shared by neighbouring chunks");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Chunk, embed and store every inquiry thread");
  std::string corpus_path;
  bool force = false;
  ingest->add_option("corpus", corpus_path, "Line-delimited corpus file")->required();
  ingest->add_flag("--force", force, "Overwrite an existing store");

  // correct / summarize / ask / inject-typos
  std::string text, file, key, question;
  std::size_t words = 0, k = 3;
  double rate = 0.15;
  std::vector<std::string> kinds{"transposition", "deletion"};
  auto* correct = app.add_subcommand("correct", "Correct spelling in an email");
  auto* summarize_cmd = app.add_subcommand("summarize", "Summarize text to a target length");
  auto* ask = app.add_subcommand("ask", "Answer a question from the stored history");
  auto* typos = app.add_subcommand("inject-typos", "Add deterministic typos to a text");
  for (auto* sub : {correct, summarize_cmd, typos}) {
    sub->add_option("--text", text, "Input text");
    sub->add_option("--file", file, "Input file");
  }
  for (auto* sub : {correct, summarize_cmd})
    sub->add_option("--key", key, "Lookup key for canned mock responses");
  summarize_cmd->add_option("--words", words, "Target summary length")->required()->check(CLI::PositiveNumber);
  ask->add_option("--question,-q", question)->required();
  ask->add_option("--k", k, "Chunks to retrieve")->check(CLI::PositiveNumber);
  typos->add_option("--rate", rate)->check(CLI::Range(0.0, 1.0));
  typos->add_option("--kinds", kinds)->delimiter(',');

  // eval
  auto* eval = app.add_subcommand("eval", "Run an evaluation job and write reports");
  eval->require_subcommand(1);
  std::string eval_corpus, queries_path;
  std::vector<std::size_t> targets = kDefaultSummaryTargets;
  std::vector<std::size_t> ks = kDefaultRelevanceKs;
  auto* ev_corr = eval->add_subcommand("correction", "Typo correction experiment");
  ev_corr->add_option("--corpus", eval_corpus)->required();
  ev_corr->add_option("--rate", rate)->check(CLI::Range(0.0, 1.0));
  ev_corr->add_option("--kinds", kinds)->delimiter(',');
  auto* ev_sum = eval->add_subcommand("summarization", "Summary length, similarity and time saved");
  ev_sum->add_option("--corpus", eval_corpus)->required();
  ev_sum->add_option("--targets", targets)->delimiter(',');
  auto* ev_ret = eval->add_subcommand("retrieval", "Relevance of the top-k chunks");
  ev_ret->add_option("--queries", queries_path)->required();
  ev_ret->add_option("--ks", ks)->delimiter(',');
  auto* ev_qa = eval->add_subcommand("qa", "Answer-to-history distance matrix");
  ev_qa->add_option("--queries", queries_path)->required();
  ev_qa->add_option("--k", k)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    AppConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    auto take = [](CLI::Option* o, auto& dst, const auto& src) {
      if (o->count() > 0) dst = src;
    };
    take(o_seed, cfg.seed, flags.seed);
    take(o_out, cfg.output_dir, flags.output_dir);
    take(o_store, cfg.store_path, flags.store_path);
    take(o_base, cfg.provider.base_url, flags.provider.base_url);
    take(o_key, cfg.provider.api_key_env, flags.provider.api_key_env);
    take(o_chat, cfg.provider.chat_model, flags.provider.chat_model);
    take(o_sum, cfg.provider.summary_model, flags.provider.summary_model);
    take(o_emb, cfg.provider.embed_model, flags.provider.embed_model);
    take(o_dim, cfg.provider.embed_dim, flags.provider.embed_dim);
    take(o_retries, cfg.provider.max_retries, flags.provider.max_retries);
    take(o_inflight, cfg.provider.max_in_flight, flags.provider.max_in_flight);
    take(o_csize, cfg.chunk.size, flags.chunk.size);
    take(o_coverlap, cfg.chunk.overlap, flags.chunk.overlap);
    if (o_timeout->count() > 0) cfg.provider.timeout = std::chrono::milliseconds(timeout_ms);
    if (cfg.chunk.size < 1 || cfg.chunk.overlap >= cfg.chunk.size)
      throw Failure{kExitInput, "chunk overlap must be smaller than chunk size"};

    // Only the typo tool runs without a backend.
    if (typos->parsed()) {
      TypoSpec spec{rate, cfg.seed, parse_kinds(kinds)};
      std::size_t mutated = 0;
      print_text(out, inject_typos(input_text(text, file), spec, mutated));
      if (verbose) err << "mutated " << mutated << " words (seed " << cfg.seed << ", " << kTypoRngName << ")\n";
      return kExitOk;
    }

    auto provider = make_provider(cfg, mock);
    auto finish_report = [&](EvalReport& r) {
      r.metadata["seed"] = std::to_string(cfg.seed);
      if (mock.empty()) r.metadata["timestamp"] = utc_timestamp();
      write_report(r, cfg.output_dir);
      if (verbose) err << "wrote " << (cfg.output_dir / (r.name + ".csv")).string() << '\n';
    };

    if (ingest->parsed()) {
      if (std::filesystem::exists(cfg.store_path) && !force)
        throw Failure{kExitInput, "store exists: " + cfg.store_path.string() + " (use --force)"};
      const Corpus corpus = load_corpus(corpus_path);
      VectorStore store(cfg.provider.embed_dim, cfg.chunk);
      for (const auto& inq : corpus.inquiries) {
        const std::size_t n = store.ingest(inq.id, full_thread_text(inq), *provider);
        out << inq.id << '\t' << n << '\n';
      }
      store.save(cfg.store_path);
      if (verbose) err << "stored " << store.size() << " chunks in " << cfg.store_path.string() << '\n';
      return kExitOk;
    }
    if (correct->parsed()) {
      print_text(out, correct_email(*provider, input_text(text, file),
                                    key.empty() ? std::nullopt : std::optional(key)));
      return kExitOk;
    }
    if (summarize_cmd->parsed()) {
      const auto r = summarize(*provider, input_text(text, file), words,
                               key.empty() ? std::nullopt : std::optional(key));
      print_text(out, r.summary);
      if (verbose)
        err << "words " << r.actual_words << " (target " << r.target_words << "), similarity "
            << fixed2(r.similarity) << '\n';
      return kExitOk;
    }
    if (ask->parsed()) {
      const auto store = open_store(cfg);
      const auto answer = answer_question(*provider, store, question, k);
      print_text(out, answer.text);
      if (verbose)
        for (const auto& hit : answer.retrieved)
          err << "chunk " << hit.chunk.chunk_id << " " << hit.chunk.inquiry_id << " distance "
              << std::setprecision(6) << hit.distance << '\n';
      return kExitOk;
    }
    if (ev_corr->parsed()) {
      const TypoSpec spec{rate, cfg.seed, parse_kinds(kinds)};
      auto report = eval_correction(load_corpus(eval_corpus), spec, *provider);
      finish_report(report);
      out << "mean errors: uncorrected " << fixed2(column_mean(report, "Uncorrected Errors"))
          << ", corrected " << fixed2(column_mean(report, "Corrected Errors")) << '\n';
      return kExitOk;
    }
    if (ev_sum->parsed()) {
      auto report = eval_summarization(load_corpus(eval_corpus), targets, *provider);
      finish_report(report);
      std::string line;
      for (auto t : targets) {
        if (!line.empty()) line += "; ";
        line += "mean time saved " + std::to_string(t) + " words " +
                fixed2(column_mean(report, "Time Saved " + std::to_string(t))) + " min";
      }
      out << line << '\n';
      return kExitOk;
    }
    if (ev_ret->parsed()) {
      const auto store = open_store(cfg);
      const auto queries = load_queries(queries_path);
      const auto results = eval_retrieval(store, queries, ks, *provider);
      auto report = retrieval_report(results);
      report.metadata["provider"] = provider->describe();
      report.metadata["embed_model"] = provider->config().embed_model;
      report.metadata["chunk_size"] = std::to_string(cfg.chunk.size);
      report.metadata["chunk_overlap"] = std::to_string(cfg.chunk.overlap);
      report.metadata["queries"] = std::to_string(queries.size());
      finish_report(report);
      std::string line;
      for (const auto& r : results) {
        if (!line.empty()) line += "; ";
        line += "k=" + std::to_string(r.k) + " proportion " + fixed2(r.proportion);
      }
      out << line << '\n';
      return kExitOk;
    }
    if (ev_qa->parsed()) {
      const auto store = open_store(cfg);
      const auto queries = load_queries(queries_path);
      auto result = eval_qa(store, queries, *provider, k);
      finish_report(result.distances);
      finish_report(result.summary);
      std::size_t at_min = 0;
      double rel = 0.0, irr = 0.0;
      std::size_t n_rel = 0, n_irr = 0;
      for (const auto& f : result.flags) {
        at_min += f.relevant_is_min;
        if (std::isfinite(f.relevant_distance)) rel += f.relevant_distance, ++n_rel;
        if (std::isfinite(f.nearest_irrelevant)) irr += f.nearest_irrelevant, ++n_irr;
      }
      out << "relevant=min " << at_min << "/" << result.flags.size() << "; mean relevant "
          << fixed2(n_rel ? rel / n_rel : NAN) << "; mean nearest irrelevant "
          << fixed2(n_irr ? irr / n_irr : NAN) << '\n';
      return kExitOk;
    }
    return kExitInput;
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == Errc::EmptyStore) err << "empty store\n";
    return e.is_provider_error() ? kExitProvider : kExitInput;
  }
}

}  // namespace tcs::cli
