#include "ragds/index/chunker.hpp"

#include "ragds/common/text.hpp"

#include <stdexcept>

namespace ragds::index {
namespace {

class SectionPacker {
 public:
  SectionPacker(const ChunkPolicy& policy, std::string id_prefix, Chunk proto,
                std::vector<Chunk>& out)
      : policy_(policy), id_prefix_(std::move(id_prefix)), proto_(std::move(proto)), out_(out) {}

  void add(const std::string& paragraph) {
    auto tokens = text::split_whitespace(paragraph);
    if (tokens.empty()) return;
    const std::size_t n = tokens.size();

    if (n > policy_.max_tokens) {
      flush();
      emit({paragraph}, std::move(tokens));
      return;
    }
    if (!parts_.empty() && tokens_.size() + n > policy_.max_tokens) flush();
    if (parts_.empty() && !carry_.empty() && carry_.size() + n <= policy_.max_tokens) {
      parts_.push_back(text::join(carry_, " "));
      tokens_ = carry_;
    }
    carry_.clear();
    parts_.push_back(paragraph);
    tokens_.insert(tokens_.end(), tokens.begin(), tokens.end());
  }

  void flush() {
    if (parts_.empty()) return;
    emit(std::move(parts_), std::move(tokens_));
    parts_.clear();
    tokens_.clear();
  }

 private:
  void emit(std::vector<std::string> parts, std::vector<std::string> tokens) {
    Chunk c = proto_;
    c.chunk_id = id_prefix_ + std::to_string(ordinal_++);
    c.text = text::join(parts, "\n\n");
    c.approx_tokens = tokens.size();
    out_.push_back(std::move(c));

    carry_.clear();
    if (policy_.overlap_tokens > 0) {
      const std::size_t keep = std::min(policy_.overlap_tokens, tokens.size());
      carry_.assign(tokens.end() - static_cast<std::ptrdiff_t>(keep), tokens.end());
    }
  }

  const ChunkPolicy& policy_;
  std::string id_prefix_;
  Chunk proto_;
  std::vector<Chunk>& out_;
  std::vector<std::string> parts_;
  std::vector<std::string> tokens_;
  std::vector<std::string> carry_;
  std::size_t ordinal_ = 0;
};

}  // namespace

std::vector<Chunk> chunk_document(const ingest::StructuredDocument& doc, const ChunkPolicy& policy) {
  if (policy.max_tokens == 0) throw std::invalid_argument("max_tokens must be > 0");
  if (policy.overlap_tokens >= policy.max_tokens) {
    throw std::invalid_argument("overlap_tokens must be < max_tokens");
  }

  std::vector<Chunk> chunks;
  std::vector<std::string> trail;
  auto walk = [&](auto&& self, const std::vector<ingest::Section>& sections,
                  std::vector<std::size_t>& path) -> void {
    for (std::size_t i = 0; i < sections.size(); ++i) {
      const auto& s = sections[i];
      path.push_back(i);
      trail.push_back(s.heading);

      std::vector<std::string> labels;
      for (auto p : path) labels.push_back(std::to_string(p));
      Chunk proto;
      proto.doc_id = doc.doc_id;
      proto.section_path = path;
      proto.heading_trail = trail;
      SectionPacker packer(policy, doc.doc_id + ":" + text::join(labels, ".") + ":",
                           std::move(proto), chunks);
      for (const auto& p : s.paragraphs) packer.add(p);
      packer.flush();

      self(self, s.children, path);
      trail.pop_back();
      path.pop_back();
    }
  };
  std::vector<std::size_t> path;
  walk(walk, doc.sections, path);
  return chunks;
}

}  // namespace ragds::index
