#include "ragds/ingest/structured_json.hpp"

#include <nlohmann/json.hpp>

namespace ragds::ingest {
namespace {

using ordered = nlohmann::ordered_json;
using nlohmann::json;

ordered section_to_json(const Section& s) {
  ordered children = ordered::array();
  for (const auto& c : s.children) children.push_back(section_to_json(c));
  ordered j;
  j["heading"] = s.heading;
  j["level"] = s.level;
  j["paragraphs"] = s.paragraphs;
  j["children"] = std::move(children);
  return j;
}

const json& require(const json& obj, const char* key, json::value_t type, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaViolation(where + ": missing field '" + key + "'");
  const bool ok = type == json::value_t::number_integer
                      ? it->is_number_integer()
                      : it->type() == type;
  if (!ok) throw SchemaViolation(where + ": field '" + key + "' has wrong type");
  return *it;
}

Section section_from_json(const json& j, int expected_level, const std::string& where) {
  if (!j.is_object()) throw SchemaViolation(where + ": section must be an object");
  Section s;
  s.heading = require(j, "heading", json::value_t::string, where).get<std::string>();
  if (s.heading.empty()) throw SchemaViolation(where + ": empty heading");
  s.level = require(j, "level", json::value_t::number_integer, where).get<int>();
  if (s.level != expected_level) {
    throw SchemaViolation(where + ": level " + std::to_string(s.level) + ", expected " +
                          std::to_string(expected_level));
  }
  for (const auto& p : require(j, "paragraphs", json::value_t::array, where)) {
    if (!p.is_string() || p.get_ref<const std::string&>().empty()) {
      throw SchemaViolation(where + ": paragraphs must be non-empty strings");
    }
    s.paragraphs.push_back(p.get<std::string>());
  }
  const auto& children = require(j, "children", json::value_t::array, where);
  for (std::size_t i = 0; i < children.size(); ++i) {
    s.children.push_back(section_from_json(children[i], expected_level + 1,
                                           where + ".children[" + std::to_string(i) + "]"));
  }
  return s;
}

}  // namespace

std::string serialize_structured(const StructuredDocument& doc) {
  ordered sections = ordered::array();
  for (const auto& s : doc.sections) sections.push_back(section_to_json(s));
  ordered j;
  j["doc_id"] = doc.doc_id;
  j["title"] = doc.title;
  j["sections"] = std::move(sections);
  return j.dump(2) + "\n";
}

StructuredDocument load_structured(std::string_view bytes) {
  json j = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw SchemaViolation("document: not valid JSON");
  if (!j.is_object()) throw SchemaViolation("document: top level must be an object");

  StructuredDocument doc;
  doc.doc_id = require(j, "doc_id", json::value_t::string, "document").get<std::string>();
  if (doc.doc_id.empty()) throw SchemaViolation("document: empty doc_id");
  doc.title = require(j, "title", json::value_t::string, "document").get<std::string>();
  const auto& sections = require(j, "sections", json::value_t::array, "document");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    doc.sections.push_back(
        section_from_json(sections[i], 1, "sections[" + std::to_string(i) + "]"));
  }
  return doc;
}

}  // namespace ragds::ingest
