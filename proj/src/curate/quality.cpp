#include "ragds/curate/quality.hpp"

#include "ragds/common/text.hpp"

#include <algorithm>

namespace ragds::curate {

std::vector<std::string> QualityRules::default_refusal_phrases() {
  return {"as an ai",   "as a language model", "i cannot",        "i can't",
          "i'm sorry",  "i am sorry",          "i am unable to",  "i'm unable to"};
}

FilterResult quality_filter(std::span<const generate::QAEntry> entries, const QualityRules& rules) {
  std::vector<std::string> phrases;
  for (const auto& p : rules.refusal_phrases) phrases.push_back(text::to_lower_ascii(p));

  FilterResult result;
  for (const auto& e : entries) {
    if (text::utf8_length(e.instruction) < rules.min_instruction_chars) {
      ++result.stats.short_instruction;
      continue;
    }
    if (text::utf8_length(e.output) < rules.min_output_chars) {
      ++result.stats.short_output;
      continue;
    }
    const auto lowered = text::to_lower_ascii(e.output);
    const bool refused = std::any_of(phrases.begin(), phrases.end(), [&](const std::string& p) {
      return !p.empty() && lowered.find(p) != std::string::npos;
    });
    if (refused) {
      ++result.stats.refusal;
      continue;
    }
    result.entries.push_back(e);
    generate::advance(result.entries.back(), generate::Status::Filtered);
  }
  return result;
}

}  // namespace ragds::curate
