#include "ragds/common/fs.hpp"
#include "ragds/ingest/document.hpp"
#include "ragds/ingest/structured_json.hpp"
#include "ragds/ingest/tei_parser.hpp"

#include "tei_oracle.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace ragds;
using namespace ragds::ingest;

namespace {

StructuredDocument parse_fixture(const std::string& name) {
  return parse_tei(fs::read_file(testing::fixture("tei/" + name)));
}

std::vector<std::string> all_paragraphs(const StructuredDocument& doc) {
  std::vector<std::string> out;
  for_each_section(doc, [&](const Section& s, const auto&) {
    out.insert(out.end(), s.paragraphs.begin(), s.paragraphs.end());
  });
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string random_text(std::mt19937_64& rng, int min_words, int max_words) {
  static const std::vector<std::string> words = {
      "fear", "anxiety", "criterion", "A.", "B:", "onset", "<duration>", "R&D", "caf\xc3\xa9",
      "six", "months", "\"quoted\"", "it's", "persistent", "mood", "\xe2\x82\xac" "5"};
  std::uniform_int_distribution<int> n(min_words, max_words);
  std::string out;
  for (int i = n(rng); i > 0; --i) {
    if (!out.empty()) out += ' ';
    out += words[rng() % words.size()];
  }
  return out;
}

Section random_section(std::mt19937_64& rng, int level) {
  Section s;
  s.heading = random_text(rng, 1, 4);
  s.level = level;
  for (int i = static_cast<int>(rng() % 4); i > 0; --i) s.paragraphs.push_back(random_text(rng, 1, 30));
  if (level < 4) {
    for (int i = static_cast<int>(rng() % 3); i > 0; --i) s.children.push_back(random_section(rng, level + 1));
  }
  return s;
}

StructuredDocument random_document(std::mt19937_64& rng) {
  StructuredDocument d;
  d.doc_id = "doc-" + std::to_string(rng() % 100000);
  d.title = rng() % 4 == 0 ? "" : random_text(rng, 1, 6);
  for (int i = static_cast<int>(rng() % 5); i > 0; --i) d.sections.push_back(random_section(rng, 1));
  return d;
}

void write_div(const Section& s, std::string& out) {
  out += "<div><head>" + xml_escape(s.heading) + "</head>\n";
  for (const auto& p : s.paragraphs) out += "  <p>" + xml_escape(p) + "</p>\n";
  for (const auto& c : s.children) write_div(c, out);
  out += "</div>\n";
}

std::string to_tei(const StructuredDocument& d) {
  std::string out = "<TEI xmlns=\"http://www.tei-c.org/ns/1.0\"><teiHeader><fileDesc><titleStmt><title>" +
                    xml_escape(d.title) + "</title></titleStmt></fileDesc></teiHeader><text><body>\n";
  for (const auto& s : d.sections) write_div(s, out);
  return out + "</body></text></TEI>\n";
}

}  // namespace

TEST_CASE("empty body yields a titled document with no sections") {
  const auto doc = parse_fixture("empty_body.xml");
  CHECK(doc.title == "An Empty Report");
  CHECK(doc.sections.empty());
  CHECK_FALSE(doc.doc_id.empty());
}

TEST_CASE("two sibling divs") {
  const auto doc = parse_fixture("two_siblings.xml");
  CHECK(doc.title == "Two Sections");
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.sections[0].heading == "Introduction");
  CHECK(doc.sections[1].heading == "Methods");
  for (const auto& s : doc.sections) {
    CHECK(s.level == 1);
    CHECK(s.paragraphs.size() == 1);
    CHECK(s.children.empty());
  }
  CHECK(doc.sections[0].paragraphs[0] == "The first section has one paragraph.");
}

TEST_CASE("nested chapter keeps children in source order") {
  const auto doc = parse_fixture("nested_anxiety.xml");
  REQUIRE(doc.sections.size() == 1);
  const auto& ch = doc.sections[0];
  CHECK(ch.heading == "Anxiety Disorders");
  CHECK(ch.paragraphs.size() == 1);
  REQUIRE(ch.children.size() == 3);
  CHECK(ch.children[0].heading == "Separation Anxiety Disorder");
  CHECK(ch.children[1].heading == "Selective Mutism");
  CHECK(ch.children[2].heading == "Specific Phobia");

  const auto& crit = ch.children[0].children.at(0);
  CHECK(crit.heading == "Diagnostic Criteria");
  CHECK(crit.level == 3);
  CHECK(crit.paragraphs.size() == 2);
  // Figure content is not a paragraph.
  CHECK(ch.children[1].paragraphs == std::vector<std::string>{"Consistent failure to speak in specific social situations."});
  // A headingless div dissolves into its parent.
  CHECK(ch.children[2].paragraphs == std::vector<std::string>{"Marked fear about a specific object or situation."});
  CHECK(ch.children[2].children.empty());
}

TEST_CASE("namespace prefixes, entities and inline markup") {
  const auto doc = parse_fixture("three_levels.xml");
  CHECK(doc.title == "Prefixed & Nested");
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.sections[0].paragraphs[0] == "Top paragraph with an entity: caf\xc3\xa9 <ok>.");
  const auto& deep = doc.sections[0].children.at(0).children.at(0);
  CHECK(deep.level == 3);
  CHECK(deep.paragraphs == std::vector<std::string>{"Deep paragraph one.", "Deep paragraph two."});
  CHECK(doc.sections[1].heading == "Second Top");
  CHECK(doc.sections[1].paragraphs.empty());
}

TEST_CASE("headingless divs merge into the nearest headed ancestor") {
  const auto doc = parse_fixture("headingless.xml");
  CHECK(doc.title.empty());
  REQUIRE(doc.sections.size() == 1);
  CHECK(doc.sections[0].heading == "Kept");
  // The orphan has no headed ancestor; it opens the next top-level section.
  CHECK(doc.sections[0].paragraphs ==
        std::vector<std::string>{"Orphan paragraph with no headed ancestor.", "Merged into Kept.", "Also merged.",
                                 "After the anonymous div."});
}

TEST_CASE("trailing orphans get a section named after the document") {
  const auto doc = parse_tei(
      "<TEI><teiHeader><fileDesc><titleStmt><title>Report</title></titleStmt></fileDesc></teiHeader>"
      "<text><body><p>Loose first.</p><div><head>A</head><p>In A.</p><div><head>A1</head><p>In A1.</p></div></div>"
      "<div><p>Loose last.</p></div></body></text></TEI>");
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.sections[0].paragraphs == std::vector<std::string>{"Loose first.", "In A."});
  CHECK(doc.sections[1].heading == "Report");
  CHECK(doc.sections[1].level == 1);
  CHECK(doc.sections[1].paragraphs == std::vector<std::string>{"Loose last."});

  const auto untitled = parse_tei("<TEI><text><body><p>Only text.</p></body></text></TEI>");
  REQUIRE(untitled.sections.size() == 1);
  CHECK(untitled.sections[0].heading == "Untitled");
}

TEST_CASE("malformed input is a typed error") {
  CHECK_THROWS_AS(parse_fixture("malformed.xml"), MalformedXml);
  CHECK_THROWS_AS(parse_tei(""), MalformedXml);
  CHECK_THROWS_AS(parse_tei("not xml at all"), MalformedXml);
  CHECK_THROWS_AS(parse_tei("<TEI><text><body>"), MalformedXml);
}

TEST_CASE("parse is total under byte mutations") {
  const auto base = fs::read_file(testing::fixture("tei/nested_anxiety.xml"));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto bytes = base;
    for (int k = 0; k < 3; ++k) {
      const auto pos = rng() % bytes.size();
      switch (rng() % 3) {
        case 0: bytes[pos] = static_cast<char>(rng() % 256); break;
        case 1: bytes.erase(pos, 1 + rng() % 20); break;
        default: bytes.insert(pos, 1, "<>&/\""[rng() % 5]); break;
      }
    }
    try {
      const auto doc = parse_tei(bytes);
      for_each_section(doc, [](const Section& s, const auto&) { CHECK_FALSE(s.heading.empty()); });
    } catch (const MalformedXml&) {
    }
  }
}

TEST_CASE("doc_id is stable and content derived") {
  const auto a = parse_fixture("two_siblings.xml");
  CHECK(a.doc_id == parse_fixture("two_siblings.xml").doc_id);
  CHECK(a.doc_id != parse_fixture("nested_anxiety.xml").doc_id);
}

TEST_CASE("table of contents") {
  CHECK(table_of_contents(parse_fixture("empty_body.xml"), 1).empty());

  const auto doc = parse_fixture("chapters22.xml");
  const auto top = table_of_contents(doc, 1);
  CHECK(top.size() == 22);
  CHECK(top.front().heading == "Neurodevelopmental");
  CHECK(top.back().heading == "Other Adverse Effects of Medication");

  const auto two = table_of_contents(doc, 2);
  REQUIRE(two.size() == 44);
  for (std::size_t i = 0; i < two.size(); i += 2) {
    CHECK(two[i].section_path.size() == 1);
    CHECK(two[i + 1].section_path.size() == 2);
    CHECK(two[i + 1].section_path[0] == two[i].section_path[0]);
  }
  for (const auto& e : two) {
    const Section* s = resolve(doc, e.section_path);
    REQUIRE(s != nullptr);
    CHECK(s->heading == e.heading);
  }
  CHECK(resolve(doc, {99}) == nullptr);
  CHECK(resolve(doc, {}) == nullptr);
}

TEST_CASE("structured json round trip on fixtures") {
  for (const auto* name : {"empty_body.xml", "two_siblings.xml", "nested_anxiety.xml", "three_levels.xml",
                           "headingless.xml", "chapters22.xml"}) {
    INFO(name);
    const auto doc = parse_fixture(name);
    const auto bytes = serialize_structured(doc);
    CHECK(load_structured(bytes) == doc);
    CHECK(serialize_structured(load_structured(bytes)) == bytes);
  }
}

TEST_CASE("paragraph text is conserved") {
  for (const auto* name : {"empty_body.xml", "two_siblings.xml", "nested_anxiety.xml", "three_levels.xml",
                           "headingless.xml", "chapters22.xml"}) {
    INFO(name);
    const auto xml = fs::read_file(testing::fixture(std::string("tei/") + name));
    CHECK(all_paragraphs(parse_tei(xml)) == testing::oracle_body_paragraphs(xml));
  }
}

TEST_CASE("schema violations on load") {
  CHECK_THROWS_AS(load_structured("{}"), SchemaViolation);
  CHECK_THROWS_AS(load_structured("not json"), SchemaViolation);
  CHECK_THROWS_AS(load_structured(R"({"doc_id":"","title":"","sections":[]})"), SchemaViolation);
  CHECK_THROWS_AS(load_structured(R"({"doc_id":"d","title":3,"sections":[]})"), SchemaViolation);
  CHECK_THROWS_AS(load_structured(
                      R"({"doc_id":"d","title":"","sections":[{"heading":"h","level":2,"paragraphs":[],"children":[]}]})"),
                  SchemaViolation);
  CHECK_THROWS_AS(load_structured(
                      R"({"doc_id":"d","title":"","sections":[{"heading":"","level":1,"paragraphs":[],"children":[]}]})"),
                  SchemaViolation);
  CHECK_THROWS_AS(load_structured(
                      R"({"doc_id":"d","title":"","sections":[{"heading":"h","level":1,"paragraphs":[""],"children":[]}]})"),
                  SchemaViolation);
  StructuredDocument empty{"doc-x", "", {}};
  CHECK(load_structured(serialize_structured(empty)) == empty);
}

TEST_CASE("property: random documents round trip through JSON and TEI") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto d = random_document(rng);
    CHECK(load_structured(serialize_structured(d)) == d);

    // Writing the tree as TEI and parsing it back recovers the same tree.
    const auto parsed = parse_tei(to_tei(d));
    CHECK(parsed.title == d.title);
    CHECK(parsed.sections == d.sections);
  }
}
