#include "ragds/ingest/document.hpp"

namespace ragds::ingest {

std::vector<TocEntry> table_of_contents(const StructuredDocument& doc, int max_level) {
  std::vector<TocEntry> toc;
  for_each_section(doc, [&](const Section& s, const std::vector<std::size_t>& path) {
    if (s.level <= max_level) toc.push_back({s.heading, path});
  });
  return toc;
}

const Section* resolve(const StructuredDocument& doc, const std::vector<std::size_t>& path) {
  if (path.empty()) return nullptr;
  const std::vector<Section>* level = &doc.sections;
  const Section* found = nullptr;
  for (std::size_t idx : path) {
    if (idx >= level->size()) return nullptr;
    found = &(*level)[idx];
    level = &found->children;
  }
  return found;
}

}  // namespace ragds::ingest
