#include "ragds/generate/qa_entry.hpp"

#include "ragds/common/error.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>

namespace ragds::generate {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Raw: return "raw";
    case Status::Deduped: return "deduped";
    case Status::Filtered: return "filtered";
    case Status::Accepted: return "accepted";
  }
  return "raw";
}

Status status_from_string(std::string_view s) {
  if (s == "raw") return Status::Raw;
  if (s == "deduped") return Status::Deduped;
  if (s == "filtered") return Status::Filtered;
  if (s == "accepted") return Status::Accepted;
  throw std::invalid_argument("unknown entry status: " + std::string(s));
}

void advance(QAEntry& e, Status next) {
  if (next < e.status) {
    throw std::logic_error("entry status cannot go from " + std::string(to_string(e.status)) +
                           " back to " + std::string(to_string(next)));
  }
  e.status = next;
}

std::string entries_to_jsonl(std::span<const QAEntry> entries) {
  std::string out;
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["instruction"] = e.instruction;
    j["output"] = e.output;
    j["category"] = e.category;
    j["source_chunk_ids"] = e.source_chunk_ids;
    j["gen_meta"] = {{"model", e.gen_meta.model},
                     {"temperature", e.gen_meta.temperature},
                     {"prompt_hash", e.gen_meta.prompt_hash}};
    j["status"] = to_string(e.status);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<QAEntry> entries_from_jsonl(std::string_view bytes) {
  std::vector<QAEntry> entries;
  std::istringstream in{std::string(bytes)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      QAEntry e;
      e.instruction = j.at("instruction").get<std::string>();
      e.output = j.at("output").get<std::string>();
      e.category = j.at("category").get<std::string>();
      e.source_chunk_ids = j.at("source_chunk_ids").get<std::vector<std::string>>();
      const auto& meta = j.at("gen_meta");
      e.gen_meta.model = meta.at("model").get<std::string>();
      e.gen_meta.temperature = meta.at("temperature").get<double>();
      e.gen_meta.prompt_hash = meta.at("prompt_hash").get<std::string>();
      e.status = status_from_string(j.at("status").get<std::string>());
      entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw Error("entries line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return entries;
}

}  // namespace ragds::generate
