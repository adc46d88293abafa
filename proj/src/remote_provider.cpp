// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "tcs/provider.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace tcs {
namespace {

using nlohmann::json;

struct Endpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

Endpoint split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(Errc::InvalidArgument, "base_url needs a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.scheme_host_port = url.substr(0, path_begin);
  if (path_begin != std::string::npos) ep.path_prefix = url.substr(path_begin);
  while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
  return ep;
}

std::string snippet(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

std::chrono::duration<double> backoff_delay(std::size_t retry, std::chrono::duration<double> base,
                                            double jitter) {
  const double j = std::clamp(jitter, 0.0, 1.0);
  const double scale = std::ldexp(1.0, static_cast<int>(retry) - 1);
  return base * (scale * (1.0 + 0.5 * j));
}

struct RemoteProvider::Impl {
  Endpoint endpoint;
  std::counting_semaphore<1024> in_flight;
  std::mutex rng_mu;
  std::mt19937_64 rng;
  SleepHook sleep;

  Impl(const ProviderConfig& cfg, std::uint64_t seed)
      : endpoint(split_base_url(cfg.base_url)),
        in_flight(static_cast<std::ptrdiff_t>(std::min<std::size_t>(cfg.max_in_flight, 1024))),
        rng(seed) {}

  double jitter() {
    std::lock_guard lock(rng_mu);
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }

  std::string bearer(const ProviderConfig& cfg) const {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw Error(Errc::AuthMissing, "environment variable " + cfg.api_key_env + " is not set");
    return std::string("Bearer ") + key;
  }

  // POSTs a JSON body, retrying transient failures. Returns the parsed body.
  json post(const ProviderConfig& cfg, const std::string& route, const json& body) {
    const std::string auth = bearer(cfg);
    const std::string payload = body.dump();
    const std::string path = endpoint.path_prefix + route;

    for (std::size_t attempt = 0;; ++attempt) {
      Errc failure;
      std::string detail;
      {
        in_flight.acquire();
        struct Release {
          std::counting_semaphore<1024>& s;
          ~Release() { s.release(); }
        } release{in_flight};

        httplib::Client client(endpoint.scheme_host_port);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        httplib::Headers headers{{"Authorization", auth}};
        auto res = client.Post(path, headers, payload, "application/json");

        if (!res) {
          failure = Errc::Transport;
          detail = httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
          json parsed = json::parse(res->body, nullptr, false);
          if (parsed.is_discarded())
            throw Error(Errc::MalformedResponse, "response is not JSON: " + snippet(res->body));
          return parsed;
        } else if (res->status == 429) {
          failure = Errc::RateLimited;
          detail = "HTTP 429";
        } else if (res->status >= 500) {
          failure = Errc::Transport;
          detail = "HTTP " + std::to_string(res->status);
        } else {
          throw Error(Errc::Transport,
                      "HTTP " + std::to_string(res->status) + ": " + snippet(res->body));
        }
      }

      if (attempt == cfg.max_retries)
        throw Error(failure, detail + " after " + std::to_string(attempt + 1) + " attempts");
      const auto delay = backoff_delay(attempt + 1, cfg.retry_base, jitter());
      if (sleep) {
        sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
};

RemoteProvider::RemoteProvider(ProviderConfig config, std::uint64_t jitter_seed)
    : Provider(std::move(config)), impl_(std::make_unique<Impl>(config_, jitter_seed)) {}

RemoteProvider::~RemoteProvider() = default;

void RemoteProvider::set_sleep_hook(SleepHook hook) { impl_->sleep = std::move(hook); }

std::string RemoteProvider::describe() const { return "remote:" + config_.base_url; }

ChatResponse RemoteProvider::chat(const ChatRequest& request) {
  if (request.user.empty()) throw Error(Errc::InvalidArgument, "empty user message");
  if (request.temperature < 0) throw Error(Errc::InvalidArgument, "negative temperature");

  json body = {
      {"model", request.model.empty() ? config_.chat_model : request.model},
      {"messages",
       json::array({{{"role", "system"}, {"content", request.system}},
                    {{"role", "user"}, {"content", request.user}}})},
      {"temperature", request.temperature},
  };
  if (request.max_tokens) body["max_tokens"] = *request.max_tokens;

  const json reply = impl_->post(config_, "/chat/completions", body);
  try {
    ChatResponse resp;
    resp.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    resp.model = reply.value("model", body["model"].get<std::string>());
    if (auto u = reply.find("usage"); u != reply.end() && u->is_object()) {
      resp.usage.prompt_tokens = u->value("prompt_tokens", std::size_t{0});
      resp.usage.completion_tokens = u->value("completion_tokens", std::size_t{0});
    }
    return resp;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("chat completion: ") + e.what());
  }
}

std::vector<EmbeddingVector> RemoteProvider::embed_batch(std::span<const std::string> texts) {
  json body = {{"model", config_.embed_model}, {"input", json::array()}};
  for (const auto& t : texts) body["input"].push_back(t);

  const json reply = impl_->post(config_, "/embeddings", body);
  try {
    const auto& data = reply.at("data");
    if (!data.is_array() || data.size() != texts.size())
      throw Error(Errc::MalformedResponse, "embedding count does not match input count");
    std::vector<EmbeddingVector> out(texts.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data[i];
      const std::size_t slot = item.value("index", i);
      if (slot >= out.size() || out[slot].dim() != 0)
        throw Error(Errc::MalformedResponse, "bad embedding index");
      const auto values = item.at("embedding").get<std::vector<double>>();
      Eigen::VectorXf v(static_cast<Eigen::Index>(values.size()));
      for (std::size_t j = 0; j < values.size(); ++j) v[static_cast<Eigen::Index>(j)] = static_cast<float>(values[j]);
      if (values.empty() || !v.allFinite())
        throw Error(Errc::MalformedResponse, "embedding is empty or not finite");
      out[slot] = EmbeddingVector(std::move(v), config_.embed_model);
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("embeddings: ") + e.what());
  }
}

}  // namespace tcs
