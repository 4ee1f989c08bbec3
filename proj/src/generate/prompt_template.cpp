#include "ragds/generate/prompt_template.hpp"

#include <cctype>
#include <functional>
#include <stdexcept>

namespace ragds::generate {
namespace {

bool tag_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == ' ' || c == '_' || c == '-';
}

// Walks the template, calling on_text for literal runs and on_tag for tags.
void scan(std::string_view t, const std::function<void(std::string_view)>& on_text,
          const std::function<void(const std::string&)>& on_tag) {
  std::size_t i = 0;
  while (i < t.size()) {
    const char c = t[i];
    if ((c == '{' || c == '}') && i + 1 < t.size() && t[i + 1] == c) {
      on_text(t.substr(i, 1));
      i += 2;
      continue;
    }
    if (c == '{' && i + 1 < t.size() && std::isalpha(static_cast<unsigned char>(t[i + 1]))) {
      std::size_t j = i + 1;
      while (j < t.size() && tag_char(t[j])) ++j;
      if (j < t.size() && t[j] == '}') {
        on_tag(std::string(t.substr(i + 1, j - i - 1)));
        i = j + 1;
        continue;
      }
    }
    on_text(t.substr(i, 1));
    ++i;
  }
}

constexpr std::string_view kDefaultPrompt =
    "Extract professional knowledge about {Disorder category} from the medical document and "
    "organize it in question-and-answer format. Each question should address a specific aspect "
    "of the topic to ensure comprehensiveness and clarity. Please output in the following JSON "
    "format :\n"
    "{\n"
    "  \"instruction\": {{QUESTION}},\n"
    "  \"output\": {{ANSWER}}\n"
    "}";

}  // namespace

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
  scan(text_, [](std::string_view) {}, [&](const std::string& tag) { tags_.insert(tag); });
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
  std::string out;
  out.reserve(text_.size());
  scan(
      text_, [&](std::string_view s) { out.append(s); },
      [&](const std::string& tag) {
        auto it = bindings.find(tag);
        if (it == bindings.end()) throw UnboundTag("no binding for tag {" + tag + "}");
        out.append(it->second);
      });
  return out;
}

PromptTemplate PromptTemplate::default_category_prompt() {
  return PromptTemplate(std::string(kDefaultPrompt));
}

std::string render_category_prompt(const PromptTemplate& tmpl, std::string_view category,
                                   std::string_view tag) {
  if (category.empty()) throw std::invalid_argument("category must be non-empty");
  return tmpl.render({{std::string(tag), std::string(category)}});
}

}  // namespace ragds::generate
