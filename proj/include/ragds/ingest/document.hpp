#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ragds::ingest {

struct Section {
  std::string heading;
  int level = 1;
  std::vector<std::string> paragraphs;
  std::vector<Section> children;

  bool operator==(const Section&) const = default;
};

struct StructuredDocument {
  std::string doc_id;
  std::string title;
  std::vector<Section> sections;

  bool operator==(const StructuredDocument&) const = default;
};

struct TocEntry {
  std::string heading;
  std::vector<std::size_t> section_path;

  bool operator==(const TocEntry&) const = default;
};

/// Sections with level <= max_level, in document (pre-)order.
std::vector<TocEntry> table_of_contents(const StructuredDocument& doc, int max_level);

/// Follows a path of child indices from the root; nullptr when it does not resolve.
const Section* resolve(const StructuredDocument& doc, const std::vector<std::size_t>& path);

/// Pre-order visit of every section with its path from the root.
template <typename Fn>
void for_each_section(const StructuredDocument& doc, Fn&& fn) {
  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, const std::vector<Section>& level) -> void {
    for (std::size_t i = 0; i < level.size(); ++i) {
      path.push_back(i);
      fn(level[i], path);
      self(self, level[i].children);
      path.pop_back();
    }
  };
  walk(walk, doc.sections);
}

}  // namespace ragds::ingest
