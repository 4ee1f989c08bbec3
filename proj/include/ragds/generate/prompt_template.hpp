#pragma once

#include "ragds/common/error.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace ragds::generate {

class UnboundTag : public Error {
 public:
  using Error::Error;
};

/// Text with `{Tag name}` placeholders. A tag is `{`, a letter, then
/// letters, digits, spaces, `_` or `-`, then `}`. `{{` and `}}` render as
/// literal braces; any other brace is literal text.
class PromptTemplate {
 public:
  explicit PromptTemplate(std::string text);

  const std::string& text() const noexcept { return text_; }
  const std::set<std::string>& required_tags() const noexcept { return tags_; }

  /// Throws UnboundTag naming the first tag without a binding.
  std::string render(const std::map<std::string, std::string>& bindings) const;

  /// The category QA-generation prompt shipped as the default.
  static PromptTemplate default_category_prompt();

 private:
  std::string text_;
  std::set<std::string> tags_;
};

inline constexpr std::string_view kCategoryTag = "Disorder category";

/// Binds `category` to the category tag. Throws std::invalid_argument on an
/// empty category and UnboundTag if the template needs any other tag.
std::string render_category_prompt(const PromptTemplate& tmpl, std::string_view category,
                                   std::string_view tag = kCategoryTag);

}  // namespace ragds::generate
