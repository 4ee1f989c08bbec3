#include "ragds/ingest/tei_parser.hpp"

#include "ragds/common/hash.hpp"
#include "ragds/common/text.hpp"

#include <expat.h>

#include <climits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ragds::ingest {
namespace {

// Strips an optional namespace prefix ("tei:div" or "uri|div" -> "div").
std::string_view local_name(const XML_Char* name) {
  std::string_view n(name);
  if (auto pos = n.find_last_of("|:"); pos != std::string_view::npos) n.remove_prefix(pos + 1);
  return n;
}

// A div as seen in the source, before headingless divs are dissolved.
// Paragraphs and child divs stay interleaved so that dissolving a
// headingless div keeps its paragraphs in source order.
struct RawDiv {
  struct Item {
    std::string paragraph;
    std::unique_ptr<RawDiv> div;
  };
  std::optional<std::string> head;
  std::vector<Item> items;
};

enum class Capture { None, Title, Head, Paragraph };

class TeiBuilder {
 public:
  void start(std::string_view name) {
    path_.emplace_back(name);
    if (capture_ != Capture::None) {
      ++capture_depth_;
      return;
    }
    if (name == "title" && in_title_stmt() && !title_) {
      begin_capture(Capture::Title);
    } else if (in_body()) {
      if (name == "div" && parent_is_body_or_div()) {
        auto div = std::make_unique<RawDiv>();
        RawDiv* raw = div.get();
        innermost().items.push_back({{}, std::move(div)});
        div_stack_.push_back(raw);
        div_depth_.push_back(path_.size());
      } else if (name == "head" && current_div_is_parent() && !div_stack_.back()->head) {
        begin_capture(Capture::Head);
      } else if (name == "p" && (current_div_is_parent() || parent_is_body())) {
        begin_capture(Capture::Paragraph);
      }
    }
  }

  void end() {
    if (capture_ != Capture::None) {
      if (capture_depth_ > 0) {
        --capture_depth_;
      } else {
        finish_capture();
      }
    } else if (!div_depth_.empty() && div_depth_.back() == path_.size()) {
      div_stack_.pop_back();
      div_depth_.pop_back();
    }
    path_.pop_back();
  }

  void characters(std::string_view data) {
    if (capture_ != Capture::None) buffer_.append(data);
  }

  StructuredDocument finish(std::string doc_id) {
    StructuredDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.title = title_.value_or("");
    std::vector<std::pair<std::size_t, std::string>> orphans;
    lower_items(body_, nullptr, 1, doc.sections, &orphans);
    attach_orphans(doc, std::move(orphans));
    return doc;
  }

 private:
  bool in_title_stmt() const {
    // teiHeader/fileDesc/titleStmt/title
    const std::size_t n = path_.size();
    return n >= 4 && path_[n - 2] == "titleStmt" && path_[n - 3] == "fileDesc" &&
           path_[n - 4] == "teiHeader";
  }

  bool in_body() const {
    for (std::size_t i = 0; i + 1 < path_.size(); ++i) {
      if (path_[i] == "body" && i > 0 && path_[i - 1] == "text") return true;
    }
    return false;
  }

  bool parent_is_body_or_div() const {
    const std::size_t n = path_.size();
    return n >= 2 && (path_[n - 2] == "body" || (path_[n - 2] == "div" && !div_stack_.empty() &&
                                                 div_depth_.back() == n - 1));
  }

  bool parent_is_body() const {
    const std::size_t n = path_.size();
    return n >= 2 && path_[n - 2] == "body";
  }

  RawDiv& innermost() { return div_stack_.empty() ? body_ : *div_stack_.back(); }

  bool current_div_is_parent() const {
    return !div_stack_.empty() && div_depth_.back() == path_.size() - 1;
  }

  void begin_capture(Capture what) {
    capture_ = what;
    capture_depth_ = 0;
    buffer_.clear();
  }

  void finish_capture() {
    std::string value = text::normalize_whitespace(buffer_);
    switch (capture_) {
      case Capture::Title:
        title_ = std::move(value);
        break;
      case Capture::Head:
        if (!value.empty()) div_stack_.back()->head = std::move(value);
        break;
      case Capture::Paragraph:
        if (!value.empty()) {
          innermost().items.push_back({std::move(value), nullptr});
        }
        break;
      case Capture::None:
        break;
    }
    capture_ = Capture::None;
    buffer_.clear();
  }

  using Orphans = std::vector<std::pair<std::size_t, std::string>>;

  // Converts a raw div into Sections appended to `out`. Headingless divs
  // contribute paragraphs to `owner` and hoist their headed children.
  // Paragraphs with no owner are collected with the count of top-level
  // sections already emitted.
  static void lower(const RawDiv& raw, Section* owner, int level, std::vector<Section>& out,
                    Orphans* orphans) {
    if (raw.head) {
      Section s;
      s.heading = *raw.head;
      s.level = level;
      lower_items(raw, &s, level + 1, s.children, orphans);
      out.push_back(std::move(s));
      return;
    }
    lower_items(raw, owner, level, out, orphans);
  }

  static void lower_items(const RawDiv& raw, Section* owner, int level, std::vector<Section>& out,
                          Orphans* orphans) {
    for (const auto& item : raw.items) {
      if (item.div) {
        lower(*item.div, owner, level, out, orphans);
      } else if (owner) {
        owner->paragraphs.push_back(item.paragraph);
      } else {
        orphans->emplace_back(out.size(), item.paragraph);
      }
    }
  }

  // Orphans open the next top-level section, which keeps source order;
  // trailing ones go to a section headed by the document title.
  static void attach_orphans(StructuredDocument& doc, Orphans orphans) {
    std::vector<std::vector<std::string>> leading(doc.sections.size());
    Section tail{doc.title.empty() ? "Untitled" : doc.title, 1, {}, {}};
    for (auto& [next, paragraph] : orphans) {
      if (next < doc.sections.size()) {
        leading[next].push_back(std::move(paragraph));
      } else {
        tail.paragraphs.push_back(std::move(paragraph));
      }
    }
    for (std::size_t i = 0; i < leading.size(); ++i) {
      auto& ps = doc.sections[i].paragraphs;
      ps.insert(ps.begin(), std::make_move_iterator(leading[i].begin()),
                std::make_move_iterator(leading[i].end()));
    }
    if (!tail.paragraphs.empty()) doc.sections.push_back(std::move(tail));
  }

  std::vector<std::string> path_;
  RawDiv body_;
  std::vector<RawDiv*> div_stack_;
  std::vector<std::size_t> div_depth_;
  std::optional<std::string> title_;
  Capture capture_ = Capture::None;
  int capture_depth_ = 0;
  std::string buffer_;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char**) {
  static_cast<TeiBuilder*>(user)->start(local_name(name));
}

void XMLCALL on_end(void* user, const XML_Char*) { static_cast<TeiBuilder*>(user)->end(); }

void XMLCALL on_chars(void* user, const XML_Char* s, int len) {
  static_cast<TeiBuilder*>(user)->characters(std::string_view(s, static_cast<std::size_t>(len)));
}

}  // namespace

StructuredDocument parse_tei(std::string_view xml_bytes) {
  if (xml_bytes.size() > static_cast<std::size_t>(INT_MAX)) {
    throw MalformedXml("TEI input too large");
  }
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreateNS(nullptr, '|'), &XML_ParserFree);
  if (!parser) throw MalformedXml("cannot allocate XML parser");

  TeiBuilder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_chars);

  if (XML_Parse(parser.get(), xml_bytes.data(), static_cast<int>(xml_bytes.size()), 1) ==
      XML_STATUS_ERROR) {
    throw MalformedXml("malformed XML at line " +
                       std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                       std::to_string(XML_GetCurrentColumnNumber(parser.get())) + ": " +
                       XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  return builder.finish("doc-" + sha256_hex(xml_bytes).substr(0, 16));
}

}  // namespace ragds::ingest
