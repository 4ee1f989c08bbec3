#pragma once

#include "ragds/common/error.hpp"
#include "ragds/ingest/document.hpp"

#include <string_view>

namespace ragds::ingest {

class MalformedXml : public Error {
 public:
  using Error::Error;
};

/// Builds the section tree from GROBID-style TEI.
///
/// Every `div` under `text/body` with a direct `head` child becomes a
/// Section; nesting is preserved. Headingless divs are dissolved: their
/// paragraphs join the nearest headed ancestor and their headed divs are
/// re-parented to it. Paragraphs with no headed ancestor open the next
/// top-level section (or, after the last one, a section headed by the
/// document title), so no body paragraph is lost. Anything that is not a
/// `p` (figures, tables, formulas, notes) is dropped.
/// The title comes from `teiHeader/fileDesc/titleStmt/title`.
///
/// doc_id is derived from a digest of the input bytes, so re-parsing the
/// same file gives the same id.
StructuredDocument parse_tei(std::string_view xml_bytes);

}  // namespace ragds::ingest
