#pragma once

#include "ragds/common/error.hpp"

#include <atomic>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace ragds::index {

class DimensionMismatch : public Error { public: using Error::Error; };
class ModelMismatch : public Error { public: using Error::Error; };
class DuplicateChunkId : public Error { public: using Error::Error; };
class InvalidVector : public Error { public: using Error::Error; };
class EmptyIndex : public Error { public: using Error::Error; };
class CorruptIndexFile : public Error { public: using Error::Error; };

struct VectorRecord {
  std::string chunk_id;
  std::vector<float> vector;
  std::string model_id;
};

struct RetrievalResult {
  std::string chunk_id;
  double similarity = 0.0;
  int rank = 0;

  bool operator==(const RetrievalResult&) const = default;
};

/// Scales `v` to unit L2 norm (norm accumulated in double, each component
/// divided then rounded to float). Throws InvalidVector on a zero or
/// non-finite vector.
std::vector<float> normalize_l2(std::span<const float> v);

/// Exact cosine top-k over unit vectors, stored contiguously.
///
/// Similarity is the double-accumulated dot product of the normalized
/// query with each stored vector, clamped to [-1, 1]. Results are ordered
/// by similarity descending, then chunk_id ascending.
///
/// The index is single-writer while it is being built. The first search
/// seals it; add_records afterwards throws std::logic_error, and a sealed
/// index may be searched from any number of threads.
class FlatIndex {
 public:
  FlatIndex() = default;
  FlatIndex(const FlatIndex& other);
  FlatIndex& operator=(const FlatIndex& other);
  FlatIndex(FlatIndex&& other) noexcept;
  FlatIndex& operator=(FlatIndex&& other) noexcept;

  /// All-or-nothing: on any error the index is unchanged.
  void add_records(std::span<const VectorRecord> records);

  std::vector<RetrievalResult> search_top_k(std::span<const float> query, std::size_t k) const;

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& model_id() const noexcept { return model_id_; }
  bool sealed() const noexcept { return sealed_.load(std::memory_order_acquire); }

  const std::string& chunk_id(std::size_t i) const { return ids_.at(i); }
  std::span<const float> vector(std::size_t i) const;

  /// Binary layout, all integers little-endian:
  ///   "RGIX" | u32 version=1 | u32 dim | u64 count | u32 len + model_id
  ///   | count x (u32 len + chunk_id | dim x f32) | u32 CRC-32 of all prior bytes
  std::string serialize() const;
  static FlatIndex deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static FlatIndex load(const std::filesystem::path& path);

 private:
  std::size_t dim_ = 0;
  std::string model_id_;
  std::vector<std::string> ids_;
  std::unordered_set<std::string> id_set_;
  std::vector<float> data_;
  mutable std::atomic<bool> sealed_{false};
};

}  // namespace ragds::index
