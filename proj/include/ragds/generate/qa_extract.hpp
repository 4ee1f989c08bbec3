#pragma once

#include "ragds/common/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ragds::generate {

class MalformedGeneration : public Error {
 public:
  using Error::Error;
};

struct QAPair {
  std::string instruction;
  std::string output;

  bool operator==(const QAPair&) const = default;
};

/// Pulls {"instruction", "output"} objects out of free-form model output.
///
/// Every balanced `{...}` or `[...]` span that parses as JSON is inspected,
/// wherever it sits (prose, code fences, arrays, wrapper objects). An object
/// qualifies when both fields are non-empty strings; extra keys are ignored.
/// Non-qualifying objects are searched recursively. Order of appearance is
/// kept. Throws MalformedGeneration when nothing qualifies.
std::vector<QAPair> extract_qa_objects(std::string_view response_text);

}  // namespace ragds::generate
