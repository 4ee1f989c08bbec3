#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragds::generate {

/// Lifecycle of a dataset entry. Transitions only move forward.
enum class Status { Raw, Deduped, Filtered, Accepted };

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

struct GenMeta {
  std::string model;
  double temperature = 0.0;
  std::string prompt_hash;

  bool operator==(const GenMeta&) const = default;
};

struct QAEntry {
  std::string instruction;
  std::string output;
  std::string category;
  std::vector<std::string> source_chunk_ids;
  GenMeta gen_meta;
  Status status = Status::Raw;

  bool operator==(const QAEntry&) const = default;
};

/// Moves `e` to `next`; throws std::logic_error on a backward transition.
void advance(QAEntry& e, Status next);

/// Full-fidelity JSON lines (every field), used for intermediate artifacts.
std::string entries_to_jsonl(std::span<const QAEntry> entries);
std::vector<QAEntry> entries_from_jsonl(std::string_view bytes);

}  // namespace ragds::generate
