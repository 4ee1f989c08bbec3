#include "ragds/generate/qa_extract.hpp"

#include <nlohmann/json.hpp>

#include <optional>

namespace ragds::generate {
namespace {

// ordered_json keeps key order so wrapper objects are walked as written.
using json = nlohmann::ordered_json;

// End (exclusive) of the bracketed span opening at `start`, honoring JSON
// string literals; nullopt when the brackets never balance.
std::optional<std::size_t> balanced_end(std::string_view t, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < t.size(); ++i) {
    const char c = t[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': case '[': ++depth; break;
      case '}': case ']':
        if (--depth == 0) return i + 1;
        break;
      default: break;
    }
  }
  return std::nullopt;
}

bool non_empty_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it != obj.end() && it->is_string() && !it->get_ref<const std::string&>().empty();
}

void collect(const json& value, std::vector<QAPair>& out) {
  if (value.is_object()) {
    if (non_empty_string(value, "instruction") && non_empty_string(value, "output")) {
      out.push_back({value["instruction"].get<std::string>(), value["output"].get<std::string>()});
      return;
    }
    for (const auto& [_, v] : value.items()) collect(v, out);
  } else if (value.is_array()) {
    for (const auto& v : value) collect(v, out);
  }
}

}  // namespace

std::vector<QAPair> extract_qa_objects(std::string_view response_text) {
  std::vector<QAPair> pairs;
  std::size_t i = 0;
  while (i < response_text.size()) {
    const char c = response_text[i];
    if (c != '{' && c != '[') {
      ++i;
      continue;
    }
    if (auto end = balanced_end(response_text, i)) {
      auto parsed = json::parse(response_text.substr(i, *end - i), nullptr, false);
      if (!parsed.is_discarded()) {
        collect(parsed, pairs);
        i = *end;
        continue;
      }
    }
    ++i;
  }
  if (pairs.empty()) throw MalformedGeneration("no instruction/output objects in model response");
  return pairs;
}

}  // namespace ragds::generate
