#include "tcs/provider.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "oracles.hpp"
#include "tcs/text.hpp"

using namespace tcs;
using nlohmann::json;

namespace {

ProviderConfig small_config(std::size_t dim = 64) {
  ProviderConfig c;
  c.embed_dim = dim;
  return c;
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

// Records batch sizes and returns a vector encoding each text's length.
class RecordingProvider final : public Provider {
 public:
  explicit RecordingProvider(ProviderConfig c) : Provider(std::move(c)) {}
  ChatResponse chat(const ChatRequest&) override { return {}; }
  std::string describe() const override { return "recording"; }

  std::vector<std::size_t> batches;
  std::atomic<int> concurrent{0};
  std::atomic<int> peak{0};

 protected:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override {
    const int now = ++concurrent;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    {
      std::lock_guard lock(mu_);
      batches.push_back(texts.size());
    }
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) {
      Eigen::VectorXf v = Eigen::VectorXf::Zero(static_cast<Eigen::Index>(config_.embed_dim));
      v[0] = static_cast<float>(std::stoi(t));
      out.emplace_back(v);
    }
    --concurrent;
    return out;
  }

 private:
  std::mutex mu_;
};

}  // namespace

TEST(MockChat, EchoReturnsUserText) {
  MockProvider p(EchoMode{}, small_config());
  EXPECT_EQ(p.chat({"sys", "hello", "m"}).text, "hello");
  EXPECT_EQ(p.describe(), "mock:echo");
}

TEST(MockChat, TruncateKeepsExactlyNWords) {
  MockProvider p(TruncateMode{10}, small_config());
  const auto r = p.chat({"sys", words(50), "m"});
  EXPECT_EQ(text::word_count(r.text), 10u);
  EXPECT_EQ(r.text, words(10));
  EXPECT_EQ(r.usage.completion_tokens, 10u);
  EXPECT_EQ(p.chat({"sys", "one two", "m"}).text, "one two");
}

TEST(MockChat, CannedByKeyThenByUserText) {
  MockProvider p(CannedMode{{{"Inc1", "gold one"}, {"raw question", "answer"}}}, small_config());
  ChatRequest req{"s", "whatever", "m"};
  req.key = "Inc1";
  EXPECT_EQ(p.chat(req).text, "gold one");
  EXPECT_EQ(p.chat({"s", "raw question", "m"}).text, "answer");
  try {
    p.chat({"s", "unknown", "m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedResponse);
  }
}

TEST(MockChat, DictionaryFixPreservesLayout) {
  MockProvider p(DictionaryFixMode{{{"teh", "the"}, {"rotuer", "router"}}}, small_config());
  EXPECT_EQ(p.chat({"s", "reset  teh\nrotuer now", "m"}).text, "reset  the\nrouter now");
}

TEST(MockChat, RejectsEmptyUserAndNegativeTemperature) {
  MockProvider p(EchoMode{}, small_config());
  EXPECT_THROW(p.chat({"s", "", "m"}), Error);
  ChatRequest r{"s", "x", "m"};
  r.temperature = -0.1;
  EXPECT_THROW(p.chat(r), Error);
}

TEST(MockEmbed, FnvMatchesPublishedVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(fnv1a64("router"), oracle::fnv1a("router"));
}

TEST(MockEmbed, ShapeDeterminismAndDegenerateInput) {
  const auto a = mock_embed("router reset", 32);
  EXPECT_EQ(a.dim(), 32);
  EXPECT_NEAR(a.values.cast<double>().norm(), 1.0, 1e-6);
  const auto b = mock_embed("router reset", 32);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(cosine_similarity(a, b), 1.0);
  EXPECT_EQ(cosine_distance(a, b), 0.0);
  // Lowercasing makes case irrelevant.
  EXPECT_EQ(mock_embed("Router RESET", 32).values, a.values);

  const auto e = mock_embed("", 8);
  Eigen::VectorXf e0 = Eigen::VectorXf::Zero(8);
  e0[0] = 1;
  EXPECT_EQ(e.values, e0);
  EXPECT_THROW(mock_embed("x", 1), Error);
}

TEST(MockEmbed, BucketsAndSignsFollowTheHash) {
  const std::size_t dim = 4096;
  const auto v = mock_embed("Modem", dim);
  const auto h = oracle::fnv1a("modem");
  const Eigen::Index idx = static_cast<Eigen::Index>(h % dim);
  EXPECT_FLOAT_EQ(v.values[idx], (h >> 63) ? -1.0f : 1.0f);
  EXPECT_FLOAT_EQ(v.values.cwiseAbs().sum(), 1.0f);
}

TEST(MockEmbed, DisjointTokenSetsAreNearlyOrthogonal) {
  // Oracle: the exact cosine of two signed bag-of-bucket vectors computed
  // from token -> (bucket, sign) maps.
  const std::size_t dim = 4096;
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> ta, tb;
    for (int i = 0; i < 10; ++i) ta.push_back("a" + std::to_string(rng() % 100000));
    for (int i = 0; i < 10; ++i) tb.push_back("b" + std::to_string(rng() % 100000));
    std::map<std::uint64_t, double> ba, bb;
    for (auto& t : ta) ba[oracle::fnv1a(t) % dim] += (oracle::fnv1a(t) >> 63) ? -1 : 1;
    for (auto& t : tb) bb[oracle::fnv1a(t) % dim] += (oracle::fnv1a(t) >> 63) ? -1 : 1;
    double dot = 0, na = 0, nb = 0;
    for (auto& [k, x] : ba) {
      na += x * x;
      if (bb.count(k)) dot += x * bb[k];
    }
    for (auto& [k, x] : bb) nb += x * x;
    const double expected = (na == 0 || nb == 0) ? 0 : dot / std::sqrt(na * nb);

    std::string sa, sb;
    for (auto& t : ta) sa += t + " ";
    for (auto& t : tb) sb += t + " ";
    const double sim = cosine_similarity(mock_embed(sa, dim), mock_embed(sb, dim));
    EXPECT_NEAR(sim, expected, 1e-6);
    if (dot == 0) {
      EXPECT_NEAR(cosine_distance(mock_embed(sa, dim), mock_embed(sb, dim)), 1.0, 1e-6);
    }
  }
}

TEST(Embed, OrderAndCardinalityAcrossBatches) {
  for (std::size_t n : {1u, 63u, 64u, 65u, 130u, 300u}) {
    auto cfg = small_config(4);
    cfg.max_in_flight = 3;
    RecordingProvider p(cfg);
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < n; ++i) texts.push_back(std::to_string(i + 1));
    const auto out = p.embed(texts);
    ASSERT_EQ(out.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(out[i].values[0], float(i + 1));
    for (auto b : p.batches) EXPECT_LE(b, kEmbedBatchSize);
    EXPECT_EQ(p.batches.size(), (n + 63) / 64);
    EXPECT_LE(p.peak.load(), 3);
  }
}

TEST(Embed, Preconditions) {
  MockProvider p(EchoMode{}, small_config());
  EXPECT_THROW(p.embed(std::vector<std::string>{}), Error);
  EXPECT_THROW(p.embed(std::vector<std::string>{"a", ""}), Error);
  const auto v = p.embed(std::vector<std::string>{"a", "a"});
  EXPECT_EQ(v[0].values, v[1].values);
  EXPECT_EQ(v[0].model_tag, kMockEmbedTag);
}

TEST(Config, Validation) {
  ProviderConfig c;
  c.max_in_flight = 0;
  EXPECT_THROW(MockProvider(EchoMode{}, c), Error);
  c = {};
  c.embed_dim = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_EQ(ProviderConfig{}.embed_dim, 1536u);
}

TEST(Backoff, DelayWithinScheduleBounds) {
  const std::chrono::duration<double> base{1.0};
  for (std::size_t k = 1; k <= 6; ++k) {
    const double lo = std::ldexp(1.0, int(k) - 1);
    for (double j : {0.0, 0.3, 0.999, 1.0}) {
      const double d = backoff_delay(k, base, j).count();
      EXPECT_GE(d, lo);
      EXPECT_LE(d, lo * 1.5);
    }
  }
}

// ---------------------------------------------------------------------------
// Wire protocol against a local server.

class WireTest : public ::testing::Test {
 protected:
  void SetUp() override {
    setenv("TCS_TEST_KEY", "sk-test-123", 1);
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      on_request(req);
      if (fail_first_ > 0) {
        --fail_first_;
        res.status = fail_status_;
        return;
      }
      const auto body = json::parse(req.body);
      const std::string user = body["messages"][1]["content"];
      json reply = {{"model", body["model"]},
                    {"choices", {{{"message", {{"role", "assistant"}, {"content", "re: " + user}}}}}},
                    {"usage", {{"prompt_tokens", 7}, {"completion_tokens", 3}}}};
      res.set_content(reply.dump(), "application/json");
    });
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      on_request(req);
      const auto body = json::parse(req.body);
      json data = json::array();
      // Reverse order with explicit indices: the client must reorder.
      for (std::size_t i = body["input"].size(); i-- > 0;) {
        const std::string t = body["input"][i];
        data.push_back({{"index", i}, {"embedding", {double(t.size()), 1.0, 0.0}}});
      }
      res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
    unsetenv("TCS_TEST_KEY");
  }

  void on_request(const httplib::Request& req) {
    std::lock_guard lock(mu_);
    ++calls_;
    last_auth_ = req.get_header_value("Authorization");
    last_body_ = req.body;
  }

  ProviderConfig config() const {
    ProviderConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
    c.api_key_env = "TCS_TEST_KEY";
    c.embed_dim = 3;
    c.timeout = std::chrono::milliseconds(2000);
    c.retry_base = std::chrono::duration<double>(0.001);
    return c;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  int calls_ = 0;
  std::atomic<int> fail_first_{0};
  int fail_status_ = 503;
  std::string last_auth_, last_body_;
};

TEST_F(WireTest, ChatRequestShapeAndParsing) {
  RemoteProvider p(config());
  ChatRequest req{"be brief", "hello", "gpt-x"};
  req.max_tokens = 50;
  req.key = "never-sent";
  const auto r = p.chat(req);
  EXPECT_EQ(r.text, "re: hello");
  EXPECT_EQ(r.model, "gpt-x");
  EXPECT_EQ(r.usage.prompt_tokens, 7u);
  EXPECT_EQ(r.usage.completion_tokens, 3u);
  EXPECT_EQ(last_auth_, "Bearer sk-test-123");
  const auto body = json::parse(last_body_);
  EXPECT_EQ(body["model"], "gpt-x");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][0]["content"], "be brief");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["max_tokens"], 50);
  EXPECT_EQ(last_body_.find("never-sent"), std::string::npos);
}

TEST_F(WireTest, EmbeddingsBatchedAndReordered) {
  RemoteProvider p(config());
  std::vector<std::string> texts;
  for (int i = 0; i < 70; ++i) texts.push_back(std::string(std::size_t(i + 1), 'x'));
  const auto out = p.embed(texts);
  ASSERT_EQ(out.size(), 70u);
  for (int i = 0; i < 70; ++i) EXPECT_EQ(out[std::size_t(i)].values[0], float(i + 1));
  EXPECT_EQ(calls_, 2);
  EXPECT_EQ(out[0].model_tag, "text-embedding-3-small");
  const auto body = json::parse(last_body_);
  EXPECT_EQ(body["model"], "text-embedding-3-small");
  EXPECT_TRUE(body["input"].is_array());
}

TEST_F(WireTest, EmbeddingDimensionMustMatchConfig) {
  auto cfg = config();
  cfg.embed_dim = 8;
  RemoteProvider p(cfg);
  try {
    p.embed_one("abc");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST_F(WireTest, RetriesTransientFailuresWithBackoff) {
  RemoteProvider p(config());
  std::vector<double> delays;
  p.set_sleep_hook([&](std::chrono::duration<double> d) { delays.push_back(d.count()); });
  fail_first_ = 2;
  fail_status_ = 503;
  EXPECT_EQ(p.chat({"s", "x", "m"}).text, "re: x");
  EXPECT_EQ(calls_, 3);
  ASSERT_EQ(delays.size(), 2u);
  EXPECT_GE(delays[0], 0.001);
  EXPECT_LE(delays[0], 0.0015);
  EXPECT_GE(delays[1], 0.002);
  EXPECT_LE(delays[1], 0.003);
}

TEST_F(WireTest, RateLimitedAfterRetriesExhausted) {
  auto cfg = config();
  cfg.max_retries = 2;
  RemoteProvider p(cfg);
  p.set_sleep_hook([](auto) {});
  fail_first_ = 100;
  fail_status_ = 429;
  try {
    p.chat({"s", "x", "m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RateLimited);
    EXPECT_TRUE(e.is_provider_error());
  }
  EXPECT_EQ(calls_, 3);  // max_retries + 1 attempts
}

TEST_F(WireTest, ClientErrorsAreNotRetried) {
  RemoteProvider p(config());
  p.set_sleep_hook([](auto) {});
  fail_first_ = 1;
  fail_status_ = 401;
  try {
    p.chat({"s", "x", "m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Transport);
  }
  EXPECT_EQ(calls_, 1);
}

TEST_F(WireTest, MissingKeyFailsBeforeAnyRequest) {
  auto cfg = config();
  cfg.api_key_env = "TCS_DEFINITELY_UNSET_KEY";
  RemoteProvider p(cfg);
  try {
    p.chat({"s", "x", "m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AuthMissing);
    EXPECT_EQ(std::string(e.what()).find("sk-test"), std::string::npos);
  }
  EXPECT_EQ(calls_, 0);
}

TEST_F(WireTest, MalformedBodyIsReported) {
  server_.Post("/v1/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices": []})", "application/json");
  });
  auto cfg = config();
  cfg.base_url += "bad";
  RemoteProvider p(cfg);
  try {
    p.chat({"s", "x", "m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedResponse);
  }
}

TEST(Remote, UnreachableHostIsTransport) {
  setenv("TCS_TEST_KEY2", "k", 1);
  ProviderConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.api_key_env = "TCS_TEST_KEY2";
  c.max_retries = 1;
  c.timeout = std::chrono::milliseconds(500);
  RemoteProvider p(c);
  p.set_sleep_hook([](auto) {});
  try {
    p.chat({"s", "x", "m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Transport);
  }
  unsetenv("TCS_TEST_KEY2");
}
