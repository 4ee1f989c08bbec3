#include "ragds/pipeline/offline.hpp"

#include "ragds/common/hash.hpp"
#include "ragds/common/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <random>

namespace ragds::pipeline {
namespace {

using gateway::ChatTurn;
using gateway::Role;

constexpr std::array<std::string_view, 14> kAspects = {
    "diagnostic criteria", "prevalence",        "development and course", "risk factors",
    "prognostic factors",  "differential diagnosis", "comorbidity",       "functional consequences",
    "cultural issues",     "sex and gender issues", "suicide risk",      "specifiers",
    "diagnostic features", "associated features"};

std::string_view last_user(std::span<const ChatTurn> messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) return it->content;
  }
  return {};
}

std::string_view system_text(std::span<const ChatTurn> messages) {
  for (const auto& m : messages) {
    if (m.role == Role::System) return m.content;
  }
  return {};
}

std::string_view between(std::string_view s, std::string_view open, std::string_view close) {
  const auto a = s.find(open);
  if (a == std::string_view::npos) return {};
  const auto from = a + open.size();
  const auto b = s.find(close, from);
  return s.substr(from, b == std::string_view::npos ? std::string_view::npos : b - from);
}

std::string bare_word(std::string_view w) {
  std::string out;
  for (char c : w) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'') {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

// Body text of formatted chunks: drops "[rank] heading" lines and separators.
std::string strip_chunk_headers(std::string_view context) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= context.size()) {
    auto nl = context.find('\n', pos);
    if (nl == std::string_view::npos) nl = context.size();
    const auto line = context.substr(pos, nl - pos);
    if (!line.empty() && line.front() != '[' && line != "---") {
      out.append(line);
      out.push_back(' ');
    }
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string> sentences(std::string_view body) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < body.size(); ++i) {
    cur.push_back(body[i]);
    const bool end = (body[i] == '.' || body[i] == '?' || body[i] == '!') &&
                     (i + 1 == body.size() || body[i + 1] == ' ');
    if (end) {
      auto s = text::normalize_whitespace(cur);
      if (text::count_whitespace_tokens(s) >= 6) out.push_back(std::move(s));
      cur.clear();
    }
  }
  auto s = text::normalize_whitespace(cur);
  if (text::count_whitespace_tokens(s) >= 6) out.push_back(std::move(s));
  return out;
}

std::string window(const std::vector<std::string>& words, std::size_t start, std::size_t len) {
  std::vector<std::string> picked;
  for (std::size_t i = start; i < words.size() && picked.size() < len; ++i) {
    auto w = bare_word(words[i]);
    if (!w.empty()) picked.push_back(std::move(w));
  }
  return text::join(picked, " ");
}

std::mt19937_64 rng_for(std::span<const ChatTurn> messages, const gateway::CompletionParams& params,
                        std::uint64_t seed, std::string_view model) {
  const std::string key = gateway::prompt_hash(messages) + "\x1f" +
                          std::to_string(params.seed.value_or(0)) + "\x1f" + std::to_string(seed) +
                          "\x1f" + std::string(model);
  return std::mt19937_64(sha256_u64(key));
}

std::string malformed_reply(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return "Here are the pairs you asked for:\n[{\"instruction\": \"What is";
    case 1: return "I will organize the material into questions and answers shortly.";
    default: return "[{\"instruction\": \"Incomplete pair\"}, {\"question\": \"Wrong keys\"}]";
  }
}

std::string generation_reply(std::span<const ChatTurn> messages,
                             const gateway::CompletionParams& params, const OfflineOptions& opt,
                             std::string_view model) {
  auto rng = rng_for(messages, params, opt.seed, model);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < opt.malformed_rate) return malformed_reply(rng);

  const auto user = last_user(messages);
  std::string category(between(user, "knowledge about ", " from the"));
  if (category.empty()) category = "the topic";
  std::size_t count = 1;
  if (auto n = between(user, "\n\nReturn ", " different"); !n.empty()) {
    count = std::clamp<std::size_t>(std::strtoul(std::string(n).c_str(), nullptr, 10), 1, 50);
  }

  auto context = system_text(messages);
  if (auto at = context.find("Context:\n"); at != std::string_view::npos) {
    context = context.substr(at + 9);
  }
  const auto body = strip_chunk_headers(context);
  auto sents = sentences(body);
  if (sents.empty()) sents.push_back("The document does not describe " + category + " in detail.");

  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = sents[rng() % sents.size()];
    const auto words = text::split_whitespace(s);
    const std::size_t span = std::min<std::size_t>(5, words.size());
    const std::size_t start = rng() % (words.size() - span + 1);
    const auto w = window(words, start, span);
    const std::string aspect(kAspects[rng() % kAspects.size()]);

    std::string q;
    switch (rng() % 6) {
      case 0: q = "What " + aspect + " of " + category + " relate to " + w + "?"; break;
      case 1: q = "How does the document describe the " + aspect + " of " + category +
                  " in connection with " + w + "?"; break;
      case 2: q = "Which " + aspect + " of " + category + " are indicated by " + w + "?"; break;
      case 3: q = "Explain the " + aspect + " of " + category + " with reference to " + w + "."; break;
      case 4: q = "According to the manual, what " + aspect + " apply to " + w + " in " + category +
                  "?"; break;
      default: q = "In " + category + ", what is said about " + aspect + " concerning " + w + "?"; break;
    }
    arr.push_back({{"instruction", q}, {"output", "Regarding " + aspect + ", the document states: " + s}});
  }
  return "```json\n" + arr.dump(2) + "\n```";
}

std::string question_reply(std::string_view user, std::uint64_t seed) {
  const auto passage = between(user, "Source passage:\n", "\n\nWrite one exam-style question");
  const auto nl = passage.find('\n');
  const auto header = passage.substr(0, nl);
  const auto body = nl == std::string_view::npos ? std::string_view{} : passage.substr(nl + 1);

  std::string topic(header.substr(std::min(header.size(), header.find(' ') + 1)));
  if (auto gt = topic.rfind(" > "); gt != std::string::npos) topic = topic.substr(gt + 3);
  const auto words = text::split_whitespace(body);
  if (words.empty()) return "What is the main point of the section on " + topic + "?";
  const std::size_t span = std::min<std::size_t>(6, words.size());
  const auto start = sha256_u64(std::string(body) + std::to_string(seed)) % (words.size() - span + 1);
  return "In the section on " + topic + ", what is meant by \"" + window(words, start, span) + "\"?";
}

std::string judge_reply(std::span<const ChatTurn> messages, std::string_view model) {
  // The grading prompt is the first user turn; a re-ask only appends turns.
  std::string_view prompt;
  for (const auto& m : messages) {
    if (m.role == Role::User) {
      prompt = m.content;
      break;
    }
  }
  const auto reference = between(prompt, "\n\nReference material:\n", "\n\nAnswer to grade:\n");
  const auto answer = between(prompt, "\n\nAnswer to grade:\n", "\n\nJudge the answer");

  std::vector<std::string> ref_words;
  for (const auto& w : text::split_whitespace(reference)) ref_words.push_back(bare_word(w));
  std::sort(ref_words.begin(), ref_words.end());
  std::size_t hits = 0, total = 0;
  for (const auto& w : text::split_whitespace(answer)) {
    const auto b = bare_word(w);
    if (b.size() < 4) continue;
    ++total;
    if (std::binary_search(ref_words.begin(), ref_words.end(), b)) ++hits;
  }
  const double overlap = total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
  const auto jitter = static_cast<int>(sha256_u64(std::string(model) + "\x1f" + std::string(answer)) % 3) - 1;
  const int score = std::clamp(1 + static_cast<int>(std::lround(9.0 * overlap)) + jitter, 1, 10);

  return "The answer shares " + std::to_string(hits) + " of " + std::to_string(total) +
         " content words with the reference material; completeness and clarity were weighed "
         "accordingly.\nSCORE: " + std::to_string(score);
}

std::string answer_reply(std::string_view question, std::string_view model) {
  std::string q = text::normalize_whitespace(question);
  while (!q.empty() && (q.back() == '?' || q.back() == '.')) q.pop_back();
  switch (sha256_u64(std::string(model)) % 3) {
    case 0: return "Briefly: " + q + ". The defining features and their clinical significance follow from the diagnostic description.";
    case 1: return "The passage addresses this directly. " + q + " refers to the criteria and course described in that section.";
    default: return "Answer: " + q + ". This should be read together with the differential diagnosis.";
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<float> bag_of_words_embedding(std::string_view text, std::size_t dim) {
  std::vector<double> acc(dim, 0.0);
  for (const auto& w : text::split_whitespace(text)) {
    const auto b = bare_word(w);
    if (b.size() < 3) continue;
    const auto h = fnv1a(b);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  std::vector<float> out(dim, 0.0f);
  if (norm == 0.0) {
    out[fnv1a(text) % dim] = 1.0f;
    return out;
  }
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

gateway::Responder offline_responder(std::string model, OfflineOptions options) {
  return [model = std::move(model), options](std::span<const ChatTurn> messages,
                                             const gateway::CompletionParams& params)
             -> std::optional<std::string> {
    const auto user = last_user(messages);
    if (user.find("question-answer pairs as a JSON array") != std::string_view::npos) {
      return generation_reply(messages, params, options, model);
    }
    if (user.find("SCORE: <integer") != std::string_view::npos) return judge_reply(messages, model);
    if (user.find("Write one exam-style question") != std::string_view::npos) {
      return question_reply(user, options.seed);
    }
    if (user.ends_with("\nStandalone question:")) {
      return std::string(between(user, "\nFollow-up question: ", "\nStandalone question:"));
    }
    if (user.empty()) return std::nullopt;
    return answer_reply(user, model);
  };
}

gateway::StubScript offline_script(const std::string& model, const OfflineOptions& options) {
  gateway::StubScript script;
  script.responder = offline_responder(model, options);
  script.embedding_dim = options.embedding_dim;
  const auto dim = options.embedding_dim;
  script.embedder = [dim](std::string_view t) { return bag_of_words_embedding(t, dim); };
  return script;
}

}  // namespace ragds::pipeline
