#include "ragds/curate/taxonomy.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <set>

namespace ragds::curate {
namespace {

std::size_t target_for(double percent, std::size_t total) {
  return static_cast<std::size_t>(std::llround(percent * static_cast<double>(total) / 100.0));
}

}  // namespace

std::optional<std::size_t> Taxonomy::find(std::string_view category) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i].name == category) return i;
  }
  return std::nullopt;
}

Taxonomy parse_taxonomy(std::string_view json_bytes) {
  const auto j = nlohmann::json::parse(json_bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw TaxonomyInvalid("taxonomy: not a JSON object");

  Taxonomy tax;
  try {
    tax.name = j.value("name", std::string{});
    const auto total = j.at("total_target").get<long long>();
    if (total < 0) throw TaxonomyInvalid("taxonomy: total_target must be >= 0");
    tax.total_target = static_cast<std::size_t>(total);

    std::set<std::string> seen;
    double sum = 0.0;
    for (const auto& c : j.at("categories")) {
      CategorySpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.target_percent = c.at("percent").get<double>();
      spec.toc_headings = c.value("toc_headings", std::vector<std::string>{});
      if (spec.name.empty()) throw TaxonomyInvalid("taxonomy: empty category name");
      if (!seen.insert(spec.name).second) {
        throw TaxonomyInvalid("taxonomy: duplicate category " + spec.name);
      }
      if (!(spec.target_percent >= 0.0)) {
        throw TaxonomyInvalid("taxonomy: negative percent for " + spec.name);
      }
      spec.target_count = target_for(spec.target_percent, tax.total_target);
      sum += spec.target_percent;
      tax.categories.push_back(std::move(spec));
    }
    if (tax.categories.empty()) throw TaxonomyInvalid("taxonomy: no categories");
    if (std::abs(sum - 100.0) > 0.01) {
      throw TaxonomyInvalid("taxonomy: percents sum to " + std::to_string(sum) + ", expected 100");
    }
  } catch (const nlohmann::json::exception& e) {
    throw TaxonomyInvalid(std::string("taxonomy: ") + e.what());
  }
  return tax;
}

Taxonomy rescale(const Taxonomy& taxonomy, std::size_t total_target) {
  Taxonomy out = taxonomy;
  out.total_target = total_target;
  for (auto& c : out.categories) c.target_count = target_for(c.target_percent, total_target);
  return out;
}

}  // namespace ragds::curate
