#include "tcs/provider.hpp"

#include <algorithm>
#include <future>

namespace tcs {

void ProviderConfig::validate() const {
  if (embed_dim < 1) throw Error(Errc::InvalidArgument, "embed_dim must be >= 1");
  if (max_in_flight < 1) throw Error(Errc::InvalidArgument, "max_in_flight must be >= 1");
}

Provider::Provider(ProviderConfig config) : config_(std::move(config)) { config_.validate(); }

EmbeddingVector Provider::embed_one(const std::string& text) {
  return std::move(embed(std::span<const std::string>(&text, 1)).front());
}

std::vector<EmbeddingVector> Provider::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(Errc::InvalidArgument, "embed called with no texts");
  for (const auto& t : texts)
    if (t.empty()) throw Error(Errc::InvalidArgument, "cannot embed an empty text");

  const std::size_t batches = (texts.size() + kEmbedBatchSize - 1) / kEmbedBatchSize;
  std::vector<std::vector<EmbeddingVector>> results(batches);
  auto run = [&](std::size_t b) {
    const std::size_t begin = b * kEmbedBatchSize;
    const std::size_t n = std::min(kEmbedBatchSize, texts.size() - begin);
    results[b] = embed_batch(texts.subspan(begin, n));
    if (results[b].size() != n)
      throw Error(Errc::MalformedResponse, "backend returned " + std::to_string(results[b].size()) +
                                               " vectors for " + std::to_string(n) + " texts");
  };

  // Waves of at most max_in_flight concurrent batches.
  for (std::size_t wave = 0; wave < batches; wave += config_.max_in_flight) {
    const std::size_t end = std::min(batches, wave + config_.max_in_flight);
    if (end - wave == 1) {
      run(wave);
      continue;
    }
    std::vector<std::future<void>> pending;
    for (std::size_t b = wave; b < end; ++b) pending.push_back(std::async(std::launch::async, run, b));
    for (auto& f : pending) f.get();
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results)
    for (auto& v : r) {
      if (static_cast<std::size_t>(v.dim()) != config_.embed_dim)
        throw Error(Errc::DimensionMismatch, "expected dim " + std::to_string(config_.embed_dim) +
                                                 ", got " + std::to_string(v.dim()));
      out.push_back(std::move(v));
    }
  return out;
}

}  // namespace tcs
