#include "ragds/index/flat_index.hpp"

#include "ragds/common/fs.hpp"
#include "ragds/common/hash.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace ragds::index {
namespace {

constexpr char kMagic[4] = {'R', 'G', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, const char* what) {
    if (n > bytes_.size() - pos_) throw CorruptIndexFile(std::string("truncated reading ") + what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint64_t uint(int width, const char* what) {
    auto s = take(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

bool ranks_before(double sa, const std::string& ia, double sb, const std::string& ib) {
  if (sa != sb) return sa > sb;
  return ia < ib;
}

}  // namespace

std::vector<float> normalize_l2(std::span<const float> v) {
  double norm2 = 0.0;
  for (float x : v) {
    if (!std::isfinite(x)) throw InvalidVector("vector has a non-finite component");
    norm2 += static_cast<double>(x) * static_cast<double>(x);
  }
  if (norm2 == 0.0) throw InvalidVector("cannot normalize a zero vector");
  const double norm = std::sqrt(norm2);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

FlatIndex::FlatIndex(const FlatIndex& other)
    : dim_(other.dim_),
      model_id_(other.model_id_),
      ids_(other.ids_),
      id_set_(other.id_set_),
      data_(other.data_),
      sealed_(other.sealed()) {}

FlatIndex& FlatIndex::operator=(const FlatIndex& other) {
  if (this != &other) {
    dim_ = other.dim_;
    model_id_ = other.model_id_;
    ids_ = other.ids_;
    id_set_ = other.id_set_;
    data_ = other.data_;
    sealed_.store(other.sealed());
  }
  return *this;
}

FlatIndex::FlatIndex(FlatIndex&& other) noexcept
    : dim_(other.dim_),
      model_id_(std::move(other.model_id_)),
      ids_(std::move(other.ids_)),
      id_set_(std::move(other.id_set_)),
      data_(std::move(other.data_)),
      sealed_(other.sealed()) {}

FlatIndex& FlatIndex::operator=(FlatIndex&& other) noexcept {
  dim_ = other.dim_;
  model_id_ = std::move(other.model_id_);
  ids_ = std::move(other.ids_);
  id_set_ = std::move(other.id_set_);
  data_ = std::move(other.data_);
  sealed_.store(other.sealed());
  return *this;
}

std::span<const float> FlatIndex::vector(std::size_t i) const {
  if (i >= ids_.size()) throw std::out_of_range("FlatIndex::vector");
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

void FlatIndex::add_records(std::span<const VectorRecord> records) {
  if (sealed()) throw std::logic_error("index is sealed; no mutation after the first search");
  if (records.empty()) return;

  const std::size_t dim = empty() ? records.front().vector.size() : dim_;
  const std::string& model = empty() ? records.front().model_id : model_id_;
  if (dim == 0) throw DimensionMismatch("records must have dimension > 0");

  std::unordered_set<std::string> batch_ids;
  std::vector<float> staged;
  staged.reserve(records.size() * dim);
  for (const auto& r : records) {
    if (r.vector.size() != dim) {
      throw DimensionMismatch("record " + r.chunk_id + " has dimension " +
                              std::to_string(r.vector.size()) + ", index has " +
                              std::to_string(dim));
    }
    if (r.model_id != model) {
      throw ModelMismatch("record " + r.chunk_id + " embedded with '" + r.model_id +
                          "', index uses '" + model + "'");
    }
    if (id_set_.contains(r.chunk_id) || !batch_ids.insert(r.chunk_id).second) {
      throw DuplicateChunkId("duplicate chunk_id " + r.chunk_id);
    }
    auto unit = normalize_l2(r.vector);
    staged.insert(staged.end(), unit.begin(), unit.end());
  }

  dim_ = dim;
  model_id_ = model;
  for (const auto& r : records) {
    ids_.push_back(r.chunk_id);
    id_set_.insert(r.chunk_id);
  }
  data_.insert(data_.end(), staged.begin(), staged.end());
}

std::vector<RetrievalResult> FlatIndex::search_top_k(std::span<const float> query,
                                                     std::size_t k) const {
  if (k == 0) throw std::invalid_argument("k must be > 0");
  if (empty()) throw EmptyIndex("search on an empty index");
  if (query.size() != dim_) {
    throw DimensionMismatch("query has dimension " + std::to_string(query.size()) +
                            ", index has " + std::to_string(dim_));
  }
  sealed_.store(true, std::memory_order_release);

  const auto q = normalize_l2(query);
  const std::size_t n = size();
  std::vector<double> sims(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float* row = data_.data() + i * dim_;
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += static_cast<double>(q[d]) * row[d];
    sims[i] = std::clamp(dot, -1.0, 1.0);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return ranks_before(sims[a], ids_[a], sims[b], ids_[b]);
                    });

  std::vector<RetrievalResult> results;
  results.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    results.push_back({ids_[order[r]], sims[order[r]], static_cast<int>(r + 1)});
  }
  return results;
}

std::string FlatIndex::serialize() const {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(dim_));
  put_u64(out, ids_.size());
  put_u32(out, static_cast<std::uint32_t>(model_id_.size()));
  out.append(model_id_);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    put_u32(out, static_cast<std::uint32_t>(ids_[i].size()));
    out.append(ids_[i]);
    for (float x : vector(i)) put_u32(out, std::bit_cast<std::uint32_t>(x));
  }
  put_u32(out, crc32(std::span(reinterpret_cast<const unsigned char*>(out.data()), out.size())));
  return out;
}

FlatIndex FlatIndex::deserialize(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 4) throw CorruptIndexFile("file too short");
  const auto body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw CorruptIndexFile("bad magic");

  Reader in(body);
  in.take(sizeof kMagic, "magic");
  const auto version = in.uint(4, "version");
  if (version != kVersion) throw CorruptIndexFile("unsupported version " + std::to_string(version));
  const auto dim = static_cast<std::size_t>(in.uint(4, "dim"));
  const auto count = in.uint(8, "count");
  const auto model_len = static_cast<std::size_t>(in.uint(4, "model_id length"));
  const std::string model(in.take(model_len, "model_id"));

  // Each record needs at least its length prefix and vector; reject counts
  // that cannot fit before allocating for them.
  if (count > in.remaining() / (4 + 4 * std::max<std::size_t>(dim, 1))) {
    throw CorruptIndexFile("record count exceeds file size");
  }
  if (count > 0 && dim == 0) throw CorruptIndexFile("records with zero dimension");

  const std::uint32_t stored_crc = static_cast<std::uint32_t>(tail.uint(4, "checksum"));
  const std::uint32_t actual_crc =
      crc32(std::span(reinterpret_cast<const unsigned char*>(body.data()), body.size()));
  if (stored_crc != actual_crc) throw CorruptIndexFile("checksum mismatch");

  FlatIndex index;
  index.dim_ = dim;
  index.model_id_ = model;
  index.ids_.reserve(count);
  index.data_.reserve(count * dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto id_len = static_cast<std::size_t>(in.uint(4, "chunk_id length"));
    std::string id(in.take(id_len, "chunk_id"));
    if (!index.id_set_.insert(id).second) throw CorruptIndexFile("duplicate chunk_id " + id);
    index.ids_.push_back(std::move(id));
    for (std::size_t d = 0; d < dim; ++d) {
      index.data_.push_back(std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4, "vector"))));
    }
  }
  if (in.remaining() != 0) throw CorruptIndexFile("trailing bytes after records");
  return index;
}

void FlatIndex::save(const std::filesystem::path& path) const {
  fs::write_file_atomic(path, serialize());
}

FlatIndex FlatIndex::load(const std::filesystem::path& path) {
  return deserialize(fs::read_file(path));
}

}  // namespace ragds::index
