#include "ragds/gateway/stub_gateway.hpp"

#include "ragds/common/hash.hpp"
#include "ragds/common/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace ragds::gateway {

StubGateway::StubGateway(EndpointProfile profile, StubScript script, LogSink log)
    : profile_(std::move(profile)), log_(std::move(log)), script_(std::move(script)) {
  if (script_.embedding_dim == 0) throw std::invalid_argument("embedding_dim must be > 0");
}

void StubGateway::script(std::span<const ChatTurn> messages, std::string response) {
  std::lock_guard lock(mu_);
  script_.responses[prompt_hash(messages)] = std::move(response);
}

void StubGateway::script_user(std::string_view content, std::string response) {
  std::lock_guard lock(mu_);
  script_.responses[user_prompt_hash(content)] = std::move(response);
}

Metrics StubGateway::metrics() const {
  std::lock_guard lock(mu_);
  return metrics_;
}

ChatResult StubGateway::chat_complete(std::span<const ChatTurn> messages,
                                      const CompletionParams& params) {
  if (messages.empty()) throw GatewayError(ErrorKind::InvalidArgument, "messages must be non-empty");

  const std::string hash = prompt_hash(messages);
  std::optional<std::string> text;
  Responder responder;
  {
    std::lock_guard lock(mu_);
    ++metrics_.chat_calls;
    if (auto it = script_.responses.find(hash); it != script_.responses.end()) {
      text = it->second;
    } else {
      for (auto m = messages.rbegin(); m != messages.rend(); ++m) {
        if (m->role != Role::User) continue;
        if (auto u = script_.responses.find(user_prompt_hash(m->content));
            u != script_.responses.end()) {
          text = u->second;
        }
        break;
      }
    }
    responder = script_.responder;
  }
  if (!text && responder) text = responder(messages, params);

  ChatResult result;
  result.text = text ? std::move(*text) : script_.fallback;
  for (const auto& m : messages) result.usage.prompt_tokens += text::count_whitespace_tokens(m.content);
  result.usage.completion_tokens = text::count_whitespace_tokens(result.text);
  result.usage.total_tokens = result.usage.prompt_tokens + result.usage.completion_tokens;
  {
    std::lock_guard lock(mu_);
    metrics_.prompt_tokens += result.usage.prompt_tokens;
    metrics_.completion_tokens += result.usage.completion_tokens;
  }
  if (log_) {
    log_(nlohmann::json{{"event", "chat"},
                        {"model", profile_.model},
                        {"prompt_hash", hash},
                        {"attempt", 1},
                        {"status", 200},
                        {"response_hash", sha256_hex(result.text)}}
             .dump());
  }
  return result;
}

std::vector<float> StubGateway::hash_embedding(std::string_view model, std::string_view text,
                                               std::size_t dim) {
  std::string key(model);
  key.push_back('\n');
  key.append(text);
  std::mt19937_64 rng(sha256_u64(key));
  std::vector<float> v(dim);
  double norm2 = 0.0;
  for (auto& x : v) {
    // Uniform in [-1, 1) from the top 53 bits; independent of the
    // standard library's distribution implementations.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = static_cast<float>(2.0 * u - 1.0);
    norm2 += static_cast<double>(x) * x;
  }
  const double norm = std::sqrt(norm2);
  for (auto& x : v) x = static_cast<float>(x / norm);
  return v;
}

std::vector<std::vector<float>> StubGateway::embed_texts(std::span<const std::string> texts) {
  if (texts.empty()) throw GatewayError(ErrorKind::InvalidArgument, "texts must be non-empty");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw GatewayError(ErrorKind::InvalidArgument, "text " + std::to_string(i) + " is empty");
    }
  }
  std::size_t dim;
  std::function<std::vector<float>(std::string_view)> embedder;
  {
    std::lock_guard lock(mu_);
    ++metrics_.embed_calls;
    dim = script_.embedding_dim;
    embedder = script_.embedder;
  }
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    out.push_back(embedder ? embedder(t) : hash_embedding(profile_.model, t, dim));
  }
  return out;
}

}  // namespace ragds::gateway
