#include "tcs/vectorstore.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <numeric>

#include "tcs/provider.hpp"
#include "tcs/text.hpp"

namespace tcs {

std::vector<Window> chunk_windows(std::size_t length, ChunkParams params) {
  if (params.size < 1 || params.overlap >= params.size)
    throw Error(Errc::InvalidParams, "chunk size must be >= 1 and overlap < size");
  std::vector<Window> out;
  const std::size_t stride = params.size - params.overlap;
  for (std::size_t s = 0; s < length; s += stride) {
    const std::size_t e = std::min(s + params.size, length);
    out.push_back({s, e});
    if (e == length) break;
  }
  return out;
}

std::vector<Window> chunk_text(std::string_view text, ChunkParams params) {
  return chunk_windows(text::scalar_count(text), params);
}

bool operator==(const Chunk& a, const Chunk& b) {
  if (a.chunk_id != b.chunk_id || a.inquiry_id != b.inquiry_id || a.text != b.text ||
      a.start != b.start || a.end != b.end || a.vector.size() != b.vector.size())
    return false;
  // Bitwise, so that NaN payloads and signed zeros round-trip too.
  return std::equal(a.vector.data(), a.vector.data() + a.vector.size(), b.vector.data(),
                    [](float x, float y) { return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y); });
}

VectorStore::VectorStore(std::size_t dim, ChunkParams params)
    : dim_(dim), params_(params), mu_(std::make_unique<std::shared_mutex>()) {
  if (dim_ < 1) throw Error(Errc::InvalidArgument, "store dim must be >= 1");
  chunk_windows(0, params_);  // validates
}

VectorStore::VectorStore(VectorStore&& other) noexcept
    : dim_(other.dim_),
      params_(other.params_),
      chunks_(std::move(other.chunks_)),
      inquiry_order_(std::move(other.inquiry_order_)),
      ingested_(std::move(other.ingested_)),
      next_id_(other.next_id_),
      mu_(std::make_unique<std::shared_mutex>()) {}

VectorStore& VectorStore::operator=(VectorStore&& other) noexcept {
  if (this != &other) {
    dim_ = other.dim_;
    params_ = other.params_;
    chunks_ = std::move(other.chunks_);
    inquiry_order_ = std::move(other.inquiry_order_);
    ingested_ = std::move(other.ingested_);
    next_id_ = other.next_id_;
  }
  return *this;
}

std::size_t VectorStore::size() const {
  std::shared_lock lock(*mu_);
  return chunks_.size();
}

std::uint64_t VectorStore::add_chunk(std::string inquiry_id, std::string text, std::size_t start,
                                     std::size_t end, Eigen::VectorXf vector) {
  if (static_cast<std::size_t>(vector.size()) != dim_)
    throw Error(Errc::DimensionMismatch, "chunk vector dim " + std::to_string(vector.size()) +
                                             " vs store dim " + std::to_string(dim_));
  if (!vector.allFinite() || vector.squaredNorm() == 0.0f)
    throw Error(Errc::InvalidArgument, "chunk vector must be finite and non-zero");
  if (start >= end) throw Error(Errc::InvalidArgument, "chunk window must be non-empty");

  std::unique_lock lock(*mu_);
  if (ingested_.insert(inquiry_id).second) inquiry_order_.push_back(inquiry_id);
  const std::uint64_t id = next_id_++;
  chunks_.push_back({id, std::move(inquiry_id), std::move(text), start, end, std::move(vector)});
  return id;
}

std::size_t VectorStore::ingest(const std::string& inquiry_id, std::string_view text, Provider& embedder) {
  if (embedder.embed_dim() != dim_)
    throw Error(Errc::DimensionMismatch, "embedder dim " + std::to_string(embedder.embed_dim()) +
                                             " vs store dim " + std::to_string(dim_));
  {
    std::shared_lock lock(*mu_);
    if (ingested_.count(inquiry_id)) throw Error(Errc::DuplicateInquiry, inquiry_id);
  }

  const auto bounds = text::scalar_boundaries(text);
  const auto windows = chunk_windows(bounds.size() - 1, params_);
  std::vector<std::string> pieces;
  pieces.reserve(windows.size());
  for (const auto& w : windows)
    pieces.emplace_back(text.substr(bounds[w.start], bounds[w.end] - bounds[w.start]));

  std::vector<EmbeddingVector> vectors;
  if (!pieces.empty()) vectors = embedder.embed(pieces);

  std::unique_lock lock(*mu_);
  if (!ingested_.insert(inquiry_id).second) throw Error(Errc::DuplicateInquiry, inquiry_id);
  if (!pieces.empty()) inquiry_order_.push_back(inquiry_id);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    chunks_.push_back({next_id_++, inquiry_id, std::move(pieces[i]), windows[i].start,
                       windows[i].end, std::move(vectors[i].values)});
  }
  return pieces.size();
}

std::vector<double> VectorStore::distances(const Eigen::VectorXf& query) const {
  if (static_cast<std::size_t>(query.size()) != dim_)
    throw Error(Errc::DimensionMismatch, "query dim " + std::to_string(query.size()) +
                                             " vs store dim " + std::to_string(dim_));
  if (chunks_.empty()) throw Error(Errc::EmptyStore, "store has no chunks");
  std::vector<double> d(chunks_.size());
  for (std::size_t i = 0; i < chunks_.size(); ++i) d[i] = cosine_distance(query, chunks_[i].vector);
  return d;
}

std::vector<SearchHit> VectorStore::search(const Eigen::VectorXf& query, std::size_t k) const {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  std::shared_lock lock(*mu_);
  const auto d = distances(query);

  // chunks_ is in ascending id order, so index order breaks ties by id.
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); });

  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) hits.push_back({chunks_[order[i]], d[order[i]]});
  return hits;
}

std::map<std::string, double> VectorStore::nearest_per_inquiry(const Eigen::VectorXf& query) const {
  std::shared_lock lock(*mu_);
  const auto d = distances(query);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    auto [it, inserted] = out.try_emplace(chunks_[i].inquiry_id, d[i]);
    if (!inserted) it->second = std::min(it->second, d[i]);
  }
  return out;
}

std::vector<std::string> VectorStore::inquiry_ids() const {
  std::shared_lock lock(*mu_);
  return inquiry_order_;
}

std::vector<Chunk> VectorStore::chunks() const {
  std::shared_lock lock(*mu_);
  return chunks_;
}

bool operator==(const VectorStore& a, const VectorStore& b) {
  if (&a == &b) return true;
  std::shared_lock la(*a.mu_);
  std::shared_lock lb(*b.mu_);
  return a.dim_ == b.dim_ && a.chunks_ == b.chunks_;
}

}  // namespace tcs
