#pragma once

#include "ragds/curate/manifest.hpp"
#include "ragds/generate/qa_entry.hpp"

#include <filesystem>
#include <span>
#include <string_view>

namespace ragds::curate {

/// figure2: {"instruction", "output"}. alpaca: adds "input": "" between them.
enum class FormatMode { Figure2, Alpaca };

std::string_view to_string(FormatMode mode);
FormatMode format_from_string(std::string_view s);

struct ExportPaths {
  std::filesystem::path dataset;
  /// `<stem>.manifest.json`
  std::filesystem::path manifest;
  /// `<stem>.provenance.jsonl`: one line per dataset line with category,
  /// source chunks and generation metadata.
  std::filesystem::path provenance;
};

ExportPaths export_paths(const std::filesystem::path& dataset);

/// One JSON object per line for `entry`, without the trailing newline.
std::string dataset_line(const generate::QAEntry& entry, FormatMode mode);

/// Writes the dataset, its provenance and its manifest. The accepted
/// counts, percents, word count and format in `manifest` are recomputed from
/// `entries`; stage counts and config are kept. Entries must all be
/// accepted (std::invalid_argument otherwise). Throws IoFailure.
DatasetManifest export_dataset(std::span<const generate::QAEntry> entries,
                               const std::filesystem::path& dataset_path, FormatMode mode,
                               DatasetManifest manifest = {});

}  // namespace ragds::curate
