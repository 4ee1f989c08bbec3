#include "ragds/curate/export.hpp"

#include "ragds/common/fs.hpp"
#include "ragds/common/text.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace ragds::curate {
namespace {

using oj = nlohmann::ordered_json;

std::string dump_line(const oj& j) {
  return j.dump(-1, ' ', false, oj::error_handler_t::replace);
}

std::filesystem::path sibling(const std::filesystem::path& dataset, std::string_view suffix) {
  auto p = dataset;
  p.replace_extension(suffix);
  return p;
}

}  // namespace

std::string_view to_string(FormatMode mode) {
  return mode == FormatMode::Alpaca ? "alpaca" : "figure2";
}

FormatMode format_from_string(std::string_view s) {
  if (s == "figure2") return FormatMode::Figure2;
  if (s == "alpaca") return FormatMode::Alpaca;
  throw std::invalid_argument("unknown dataset format: " + std::string(s));
}

ExportPaths export_paths(const std::filesystem::path& dataset) {
  return {dataset, sibling(dataset, ".manifest.json"), sibling(dataset, ".provenance.jsonl")};
}

std::string dataset_line(const generate::QAEntry& entry, FormatMode mode) {
  oj j;
  j["instruction"] = entry.instruction;
  if (mode == FormatMode::Alpaca) j["input"] = "";
  j["output"] = entry.output;
  return dump_line(j);
}

DatasetManifest export_dataset(std::span<const generate::QAEntry> entries,
                               const std::filesystem::path& dataset_path, FormatMode mode,
                               DatasetManifest manifest) {
  std::string dataset;
  std::string provenance;
  for (auto& c : manifest.categories) c.accepted = 0;
  manifest.word_count = 0;

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.status != generate::Status::Accepted) {
      throw std::invalid_argument("export_dataset: entry " + std::to_string(i) + " is not accepted");
    }
    dataset += dataset_line(e, mode);
    dataset += '\n';

    oj prov;
    prov["line"] = i + 1;
    prov["category"] = e.category;
    prov["source_chunk_ids"] = e.source_chunk_ids;
    prov["model"] = e.gen_meta.model;
    prov["temperature"] = e.gen_meta.temperature;
    prov["prompt_hash"] = e.gen_meta.prompt_hash;
    provenance += dump_line(prov);
    provenance += '\n';

    manifest.word_count +=
        text::count_whitespace_tokens(e.instruction) + text::count_whitespace_tokens(e.output);
    auto it = std::find_if(manifest.categories.begin(), manifest.categories.end(),
                           [&](const CategoryCounts& c) { return c.name == e.category; });
    if (it == manifest.categories.end()) {
      manifest.categories.push_back({.name = e.category});
      it = std::prev(manifest.categories.end());
    }
    ++it->accepted;
  }
  for (auto& c : manifest.categories) c.shortfall = c.target > c.accepted ? c.target - c.accepted : 0;
  manifest.format = std::string(to_string(mode));
  recompute_totals(manifest);

  const auto paths = export_paths(dataset_path);
  fs::write_file_atomic(paths.dataset, dataset);
  fs::write_file_atomic(paths.provenance, provenance);
  fs::write_file_atomic(paths.manifest, manifest_to_json(manifest));
  return manifest;
}

}  // namespace ragds::curate
