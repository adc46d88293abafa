// Store file layout, all integers little-endian:
//
//   magic "TCSVEC01" | version u32 | dim u32 | metric u8 | count u64
//   count x { chunk_id u64 | inquiry_id (u16 len + bytes) | start u64 | end u64 |
//             text (u32 len + bytes) | dim x f32 }

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "tcs/text.hpp"
#include "tcs/vectorstore.hpp"

namespace tcs {
namespace {

class Writer {
 public:
  explicit Writer(std::string& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>(u & 0xFF));
      if constexpr (sizeof(T) > 1) u = static_cast<U>(u >> 8);
    }
  }
  void put_f32(float f) { put(std::bit_cast<std::uint32_t>(f)); }
  void put_bytes(std::string_view s) { out_.append(s); }

 private:
  std::string& out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == in_.size(); }

  template <typename T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n)
      throw Error(Errc::Corrupt, "truncated at offset " + std::to_string(pos_));
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

[[noreturn]] void corrupt(std::size_t offset, const std::string& why) {
  throw Error(Errc::Corrupt, why + " at offset " + std::to_string(offset));
}

}  // namespace

std::string VectorStore::serialize() const {
  std::shared_lock lock(*mu_);
  std::string out;
  Writer w(out);
  w.put_bytes(std::string_view(kStoreMagic, sizeof(kStoreMagic)));
  w.put(kStoreVersion);
  w.put(static_cast<std::uint32_t>(dim_));
  w.put(static_cast<std::uint8_t>(Metric::Cosine));
  w.put(static_cast<std::uint64_t>(chunks_.size()));
  for (const auto& c : chunks_) {
    if (c.inquiry_id.size() > std::numeric_limits<std::uint16_t>::max())
      throw Error(Errc::InvalidArgument, "inquiry id too long to store");
    if (c.text.size() > std::numeric_limits<std::uint32_t>::max())
      throw Error(Errc::InvalidArgument, "chunk text too long to store");
    w.put(c.chunk_id);
    w.put(static_cast<std::uint16_t>(c.inquiry_id.size()));
    w.put_bytes(c.inquiry_id);
    w.put(static_cast<std::uint64_t>(c.start));
    w.put(static_cast<std::uint64_t>(c.end));
    w.put(static_cast<std::uint32_t>(c.text.size()));
    w.put_bytes(c.text);
    for (Eigen::Index i = 0; i < c.vector.size(); ++i) w.put_f32(c.vector[i]);
  }
  return out;
}

VectorStore VectorStore::deserialize(std::string_view bytes, ChunkParams params) {
  Reader r(bytes);
  if (bytes.size() < sizeof(kStoreMagic) &&
      std::memcmp(bytes.data(), kStoreMagic, bytes.size()) == 0)
    corrupt(bytes.size(), "truncated magic");
  if (bytes.size() < sizeof(kStoreMagic) ||
      std::memcmp(bytes.data(), kStoreMagic, sizeof(kStoreMagic)) != 0)
    throw Error(Errc::BadMagic, "not a vector store file");
  r.get_bytes(sizeof(kStoreMagic));

  const auto version = r.get<std::uint32_t>();
  if (version != kStoreVersion)
    throw Error(Errc::VersionUnsupported, "store version " + std::to_string(version));
  const std::size_t dim_at = r.offset();
  const auto dim = r.get<std::uint32_t>();
  if (dim < 1) corrupt(dim_at, "zero dimension");
  const std::size_t metric_at = r.offset();
  if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(Metric::Cosine))
    corrupt(metric_at, "unknown metric");
  const auto count = r.get<std::uint64_t>();

  VectorStore store(dim, params);
  for (std::uint64_t n = 0; n < count; ++n) {
    const std::size_t record_at = r.offset();
    Chunk c;
    c.chunk_id = r.get<std::uint64_t>();
    if (!store.chunks_.empty() && c.chunk_id <= store.chunks_.back().chunk_id)
      corrupt(record_at, "chunk ids not increasing");
    c.inquiry_id = r.get_bytes(r.get<std::uint16_t>());
    if (c.inquiry_id.empty()) corrupt(record_at, "empty inquiry id");
    c.start = r.get<std::uint64_t>();
    c.end = r.get<std::uint64_t>();
    const std::size_t text_at = r.offset();
    c.text = r.get_bytes(r.get<std::uint32_t>());
    if (c.start >= c.end || text::scalar_count(c.text) != c.end - c.start)
      corrupt(text_at, "chunk window does not match its text");
    const std::size_t vec_at = r.offset();
    c.vector.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) c.vector[i] = r.get_f32();
    if (!c.vector.allFinite() || c.vector.squaredNorm() == 0.0f)
      corrupt(vec_at, "vector is zero or not finite");

    if (store.ingested_.insert(c.inquiry_id).second) store.inquiry_order_.push_back(c.inquiry_id);
    store.next_id_ = c.chunk_id + 1;
    store.chunks_.push_back(std::move(c));
  }
  if (!r.at_end()) corrupt(r.offset(), "trailing bytes");
  return store;
}

void VectorStore::save(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

VectorStore VectorStore::load(const std::filesystem::path& path, ChunkParams params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::Io, "read failed: " + path.string());
  return deserialize(buf.str(), params);
}

}  // namespace tcs
