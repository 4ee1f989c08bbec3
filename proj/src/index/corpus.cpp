#include "ragds/index/corpus.hpp"

#include "ragds/common/fs.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace ragds::index {

Corpus::Corpus(FlatIndex index, std::vector<Chunk> chunks)
    : index_(std::move(index)), chunks_(std::move(chunks)) {
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    if (!by_id_.emplace(chunks_[i].chunk_id, i).second) {
      throw DuplicateChunkId("duplicate chunk_id " + chunks_[i].chunk_id);
    }
  }
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (!by_id_.contains(index_.chunk_id(i))) {
      throw CorruptIndexFile("index refers to unknown chunk " + index_.chunk_id(i));
    }
  }
}

const Chunk& Corpus::chunk(const std::string& chunk_id) const {
  auto it = by_id_.find(chunk_id);
  if (it == by_id_.end()) throw std::out_of_range("unknown chunk_id " + chunk_id);
  return chunks_[it->second];
}

std::filesystem::path Corpus::chunks_path(const std::filesystem::path& index_path) {
  auto p = index_path;
  p += ".chunks.jsonl";
  return p;
}

void Corpus::save(const std::filesystem::path& index_path) const {
  fs::write_file_atomic(chunks_path(index_path), chunks_to_jsonl(chunks_));
  index_.save(index_path);
}

Corpus Corpus::load(const std::filesystem::path& index_path) {
  auto index = FlatIndex::load(index_path);
  return Corpus(std::move(index), chunks_from_jsonl(fs::read_file(chunks_path(index_path))));
}

std::string chunks_to_jsonl(const std::vector<Chunk>& chunks) {
  std::string out;
  for (const auto& c : chunks) {
    nlohmann::ordered_json j;
    j["chunk_id"] = c.chunk_id;
    j["doc_id"] = c.doc_id;
    j["section_path"] = c.section_path;
    j["heading_trail"] = c.heading_trail;
    j["text"] = c.text;
    j["approx_tokens"] = c.approx_tokens;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Chunk> chunks_from_jsonl(std::string_view bytes) {
  std::vector<Chunk> chunks;
  std::istringstream in{std::string(bytes)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Chunk c;
      c.chunk_id = j.at("chunk_id").get<std::string>();
      c.doc_id = j.at("doc_id").get<std::string>();
      c.section_path = j.at("section_path").get<std::vector<std::size_t>>();
      c.heading_trail = j.value("heading_trail", std::vector<std::string>{});
      c.text = j.at("text").get<std::string>();
      c.approx_tokens = j.at("approx_tokens").get<std::size_t>();
      chunks.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw CorruptIndexFile("chunks line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return chunks;
}

Corpus build_corpus(const ingest::StructuredDocument& doc, const ChunkPolicy& policy,
                    gateway::Gateway& embedder) {
  auto chunks = chunk_document(doc, policy);
  FlatIndex index;
  if (!chunks.empty()) {
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);
    auto vectors = embedder.embed_texts(texts);
    std::vector<VectorRecord> records;
    records.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      records.push_back({chunks[i].chunk_id, std::move(vectors[i]), embedder.profile().model});
    }
    index.add_records(records);
  }
  return Corpus(std::move(index), std::move(chunks));
}

}  // namespace ragds::index
