#include "ragds/curate/manifest.hpp"

#include "ragds/common/error.hpp"

namespace ragds::curate {

void recompute_totals(DatasetManifest& m) {
  m.totals = {};
  for (const auto& c : m.categories) {
    m.totals.raw += c.raw;
    m.totals.after_exact_dedup += c.after_exact_dedup;
    m.totals.after_near_dedup += c.after_near_dedup;
    m.totals.after_filter += c.after_filter;
    m.totals.accepted += c.accepted;
  }
  for (auto& c : m.categories) {
    c.achieved_percent = m.totals.accepted == 0
                             ? 0.0
                             : 100.0 * static_cast<double>(c.accepted) /
                                   static_cast<double>(m.totals.accepted);
  }
}

std::string manifest_to_json(const DatasetManifest& m) {
  using oj = nlohmann::ordered_json;
  oj cats = oj::array();
  for (const auto& c : m.categories) {
    oj row;
    row["name"] = c.name;
    row["target"] = c.target;
    row["raw"] = c.raw;
    row["after_exact_dedup"] = c.after_exact_dedup;
    row["after_near_dedup"] = c.after_near_dedup;
    row["after_filter"] = c.after_filter;
    row["accepted"] = c.accepted;
    row["shortfall"] = c.shortfall;
    row["achieved_percent"] = c.achieved_percent;
    cats.push_back(std::move(row));
  }
  oj j;
  j["taxonomy"] = m.taxonomy;
  j["format"] = m.format;
  j["categories"] = std::move(cats);
  j["totals"] = {{"raw", m.totals.raw},
                 {"after_exact_dedup", m.totals.after_exact_dedup},
                 {"after_near_dedup", m.totals.after_near_dedup},
                 {"after_filter", m.totals.after_filter},
                 {"accepted", m.totals.accepted}};
  j["filter_drops"] = {{"short_instruction", m.filter_drops.short_instruction},
                       {"short_output", m.filter_drops.short_output},
                       {"refusal", m.filter_drops.refusal}};
  j["word_count"] = m.word_count;
  j["config"] = m.config;
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view bytes) {
  try {
    const auto j = nlohmann::ordered_json::parse(bytes);
    DatasetManifest m;
    m.taxonomy = j.at("taxonomy").get<std::string>();
    m.format = j.at("format").get<std::string>();
    for (const auto& row : j.at("categories")) {
      CategoryCounts c;
      c.name = row.at("name").get<std::string>();
      c.target = row.at("target").get<std::size_t>();
      c.raw = row.at("raw").get<std::size_t>();
      c.after_exact_dedup = row.at("after_exact_dedup").get<std::size_t>();
      c.after_near_dedup = row.at("after_near_dedup").get<std::size_t>();
      c.after_filter = row.at("after_filter").get<std::size_t>();
      c.accepted = row.at("accepted").get<std::size_t>();
      c.shortfall = row.at("shortfall").get<std::size_t>();
      c.achieved_percent = row.at("achieved_percent").get<double>();
      m.categories.push_back(std::move(c));
    }
    const auto& t = j.at("totals");
    m.totals = {t.at("raw").get<std::size_t>(), t.at("after_exact_dedup").get<std::size_t>(),
                t.at("after_near_dedup").get<std::size_t>(), t.at("after_filter").get<std::size_t>(),
                t.at("accepted").get<std::size_t>()};
    const auto& d = j.at("filter_drops");
    m.filter_drops = {d.at("short_instruction").get<std::size_t>(),
                      d.at("short_output").get<std::size_t>(), d.at("refusal").get<std::size_t>()};
    m.word_count = j.at("word_count").get<std::size_t>();
    m.config = j.at("config");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
}

}  // namespace ragds::curate
