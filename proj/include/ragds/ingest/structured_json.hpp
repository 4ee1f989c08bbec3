#pragma once

#include "ragds/common/error.hpp"
#include "ragds/ingest/document.hpp"

#include <string>
#include <string_view>

namespace ragds::ingest {

class SchemaViolation : public Error {
 public:
  using Error::Error;
};

/// Canonical structured JSON: {doc_id, title, sections:[{heading, level,
/// paragraphs, children}]}, UTF-8, two-space indent, keys in that order.
std::string serialize_structured(const StructuredDocument& doc);

/// Inverse of serialize_structured. Rejects missing or mistyped fields and
/// tree invariants (empty heading, child level != parent level + 1).
StructuredDocument load_structured(std::string_view bytes);

}  // namespace ragds::ingest
