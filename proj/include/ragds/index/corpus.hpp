#pragma once

#include "ragds/gateway/types.hpp"
#include "ragds/index/chunker.hpp"
#include "ragds/index/flat_index.hpp"

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace ragds::index {

/// A searchable corpus: the vector index plus the chunk texts it refers to.
/// On disk the chunks live next to the index file as `<index>.chunks.jsonl`.
class Corpus {
 public:
  Corpus() = default;
  Corpus(FlatIndex index, std::vector<Chunk> chunks);

  const FlatIndex& index() const noexcept { return index_; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  std::size_t size() const noexcept { return chunks_.size(); }

  /// Throws std::out_of_range for an unknown id.
  const Chunk& chunk(const std::string& chunk_id) const;

  void save(const std::filesystem::path& index_path) const;
  static Corpus load(const std::filesystem::path& index_path);

  static std::filesystem::path chunks_path(const std::filesystem::path& index_path);

 private:
  FlatIndex index_;
  std::vector<Chunk> chunks_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Chunks `doc`, embeds every chunk through `embedder` and indexes the
/// vectors under the embedder's model id.
Corpus build_corpus(const ingest::StructuredDocument& doc, const ChunkPolicy& policy,
                    gateway::Gateway& embedder);

std::string chunks_to_jsonl(const std::vector<Chunk>& chunks);
std::vector<Chunk> chunks_from_jsonl(std::string_view bytes);

}  // namespace ragds::index
