#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "tcs/metrics.hpp"

namespace tcs {

class Provider;

struct ChunkParams {
  std::size_t size = 1000;
  std::size_t overlap = 200;
};

/// Half-open character (Unicode scalar) window.
struct Window {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Sliding windows of `size` characters with stride size - overlap; the
/// last window ends at the text length. Throws InvalidParams unless
/// size >= 1 and overlap < size.
std::vector<Window> chunk_windows(std::size_t length, ChunkParams params);
std::vector<Window> chunk_text(std::string_view text, ChunkParams params);

struct Chunk {
  std::uint64_t chunk_id = 0;
  std::string inquiry_id;
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  Eigen::VectorXf vector;

  friend bool operator==(const Chunk& a, const Chunk& b);
};

struct SearchHit {
  Chunk chunk;
  double distance = 0.0;
};

enum class Metric : std::uint8_t { Cosine = 0 };

/// Exact cosine k-NN index over embedded chunks.
///
/// Searches may run concurrently; ingest takes exclusive access and makes
/// an inquiry's chunks visible all at once.
class VectorStore {
 public:
  explicit VectorStore(std::size_t dim, ChunkParams params = {});

  VectorStore(VectorStore&& other) noexcept;
  VectorStore& operator=(VectorStore&& other) noexcept;
  VectorStore(const VectorStore&) = delete;
  VectorStore& operator=(const VectorStore&) = delete;

  std::size_t dim() const { return dim_; }
  const ChunkParams& chunk_params() const { return params_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Chunks, embeds and appends `text`. Returns the number of chunks added.
  /// Throws DuplicateInquiry if the id was ingested before, DimensionMismatch
  /// if the embedder's dimension differs; provider errors propagate.
  std::size_t ingest(const std::string& inquiry_id, std::string_view text, Provider& embedder);

  /// Appends a pre-embedded chunk; its id is assigned by the store.
  std::uint64_t add_chunk(std::string inquiry_id, std::string text, std::size_t start,
                          std::size_t end, Eigen::VectorXf vector);

  /// min(k, size) hits by ascending distance, ties by ascending chunk id.
  std::vector<SearchHit> search(const Eigen::VectorXf& query, std::size_t k) const;
  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k) const {
    return search(query.values, k);
  }

  /// Minimum distance to each inquiry's chunks.
  std::map<std::string, double> nearest_per_inquiry(const Eigen::VectorXf& query) const;

  /// Inquiry ids in first-ingest order.
  std::vector<std::string> inquiry_ids() const;

  /// Snapshot of all chunks in id order.
  std::vector<Chunk> chunks() const;

  void save(const std::filesystem::path& path) const;
  static VectorStore load(const std::filesystem::path& path, ChunkParams params = {});

  /// Serialized form, identical to the file contents written by save().
  std::string serialize() const;
  static VectorStore deserialize(std::string_view bytes, ChunkParams params = {});

  friend bool operator==(const VectorStore& a, const VectorStore& b);

 private:
  std::vector<double> distances(const Eigen::VectorXf& query) const;

  std::size_t dim_;
  ChunkParams params_;
  std::vector<Chunk> chunks_;
  std::vector<std::string> inquiry_order_;
  std::set<std::string> ingested_;
  std::uint64_t next_id_ = 0;
  mutable std::unique_ptr<std::shared_mutex> mu_;
};

inline constexpr char kStoreMagic[8] = {'T', 'C', 'S', 'V', 'E', 'C', '0', '1'};
inline constexpr std::uint32_t kStoreVersion = 1;

}  // namespace tcs
