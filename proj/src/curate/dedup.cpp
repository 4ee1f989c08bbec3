#include "ragds/curate/dedup.hpp"

#include "ragds/common/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ragds::curate {
namespace {

std::string strip_punct(const std::string& w) {
  std::size_t b = 0;
  std::size_t e = w.size();
  auto punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  while (b < e && punct(w[b])) ++b;
  while (e > b && punct(w[e - 1])) --e;
  return w.substr(b, e - b);
}

// Both inputs sorted and duplicate-free.
template <typename T>
double sorted_jaccard(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

}  // namespace

std::vector<QAEntry> exact_dedup(std::span<const QAEntry> entries) {
  std::unordered_set<std::string> seen;
  std::vector<QAEntry> out;
  for (const auto& e : entries) {
    if (!seen.insert(text::normalize_instruction(e.instruction)).second) continue;
    out.push_back(e);
    generate::advance(out.back(), generate::Status::Deduped);
  }
  return out;
}

std::vector<std::string> instruction_shingles(std::string_view instruction) {
  std::vector<std::string> words;
  for (const auto& w : text::split_whitespace(text::to_lower_ascii(instruction))) {
    auto s = strip_punct(w);
    if (!s.empty()) words.push_back(std::move(s));
  }
  std::vector<std::string> shingles;
  if (words.empty()) return shingles;
  if (words.size() < 3) {
    shingles.push_back(text::join(words, " "));
  } else {
    for (std::size_t i = 0; i + 3 <= words.size(); ++i) {
      shingles.push_back(words[i] + " " + words[i + 1] + " " + words[i + 2]);
    }
  }
  std::sort(shingles.begin(), shingles.end());
  shingles.erase(std::unique(shingles.begin(), shingles.end()), shingles.end());
  return shingles;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return sorted_jaccard(a, b);
}

std::vector<QAEntry> near_dedup(std::span<const QAEntry> entries, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("near-dup threshold must be in (0, 1]");
  }

  // Intern shingles so comparisons run over sorted integer ids; exact, no
  // hash collisions.
  std::unordered_map<std::string, std::uint32_t> ids;
  auto encode = [&](const QAEntry& e) {
    std::vector<std::uint32_t> set;
    for (auto& s : instruction_shingles(e.instruction)) {
      auto [it, _] = ids.try_emplace(std::move(s), static_cast<std::uint32_t>(ids.size()));
      set.push_back(it->second);
    }
    std::sort(set.begin(), set.end());
    return set;
  };
  std::vector<std::vector<std::uint32_t>> kept_sets;
  std::vector<QAEntry> out;
  for (const auto& e : entries) {
    auto set = encode(e);
    // Jaccard >= t is impossible when the size ratio is below t.
    const bool dup = std::any_of(kept_sets.begin(), kept_sets.end(), [&](const auto& k) {
      const auto lo = std::min(k.size(), set.size());
      const auto hi = std::max(k.size(), set.size());
      if (hi > 0 && static_cast<double>(lo) / static_cast<double>(hi) < threshold) return false;
      return sorted_jaccard(k, set) >= threshold;
    });
    if (dup) continue;
    kept_sets.push_back(std::move(set));
    out.push_back(e);
    generate::advance(out.back(), generate::Status::Deduped);
  }
  return out;
}

}  // namespace ragds::curate
