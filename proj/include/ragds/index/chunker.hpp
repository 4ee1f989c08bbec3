#pragma once

#include "ragds/ingest/document.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ragds::index {

struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::vector<std::size_t> section_path;
  /// Headings from the top-level section down to the owning section.
  std::vector<std::string> heading_trail;
  std::string text;
  std::size_t approx_tokens = 0;

  bool operator==(const Chunk&) const = default;
};

struct ChunkPolicy {
  std::size_t max_tokens = 256;
  std::size_t overlap_tokens = 32;
};

/// Greedy paragraph packing, one section at a time.
///
/// Paragraphs are never split: one that alone exceeds max_tokens becomes
/// its own chunk. When overlap_tokens > 0, a chunk after the first in a
/// section starts with the trailing overlap_tokens tokens of its
/// predecessor, provided that still fits under max_tokens. Paragraphs in
/// one chunk are separated by a blank line.
///
/// Throws std::invalid_argument unless 0 <= overlap_tokens < max_tokens.
std::vector<Chunk> chunk_document(const ingest::StructuredDocument& doc, const ChunkPolicy& policy);

}  // namespace ragds::index
