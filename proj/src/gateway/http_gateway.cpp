#include "ragds/gateway/http_gateway.hpp"

#include "ragds/common/hash.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <thread>

namespace ragds::gateway {
namespace {

using nlohmann::json;

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> split_base_url(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("base_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

ErrorKind classify_status(int status) {
  if (status == 408) return ErrorKind::Timeout;
  if (status == 429) return ErrorKind::RateLimited;
  if (status >= 500) return ErrorKind::ServerError;
  return ErrorKind::BadRequest;
}

ErrorKind classify_transport(httplib::Error err) {
  switch (err) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
    case httplib::Error::Write:
      return ErrorKind::Timeout;
    default:
      return ErrorKind::ServerError;
  }
}

std::string truncate(const std::string& s, std::size_t n) {
  return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

HttpGateway::HttpGateway(EndpointProfile profile) : HttpGateway(std::move(profile), Options{}) {}

HttpGateway::HttpGateway(EndpointProfile profile, Options options)
    : profile_(std::move(profile)),
      options_(std::move(options)),
      limiter_((validate(profile_), profile_.max_concurrent)),
      backoff_(profile_.backoff_base, options_.jitter_seed) {
  std::tie(scheme_host_port_, path_prefix_) = split_base_url(profile_.base_url);
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (!options_.env) {
    options_.env = [](const std::string& name) -> std::optional<std::string> {
      if (const char* v = std::getenv(name.c_str())) return std::string(v);
      return std::nullopt;
    };
  }
}

HttpGateway::~HttpGateway() = default;

Metrics HttpGateway::metrics() const {
  std::lock_guard lock(metrics_mu_);
  Metrics m = metrics_;
  m.max_in_flight = limiter_.high_water();
  return m;
}

void HttpGateway::log(std::string_view line) const {
  if (options_.log) options_.log(line);
}

HttpGateway::Response HttpGateway::post_once(const std::string& path, const std::string& body) {
  auto permit = limiter_.acquire();
  {
    std::lock_guard lock(metrics_mu_);
    ++metrics_.http_requests;
  }

  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(profile_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(profile_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!profile_.credential_ref.empty()) {
    if (auto key = options_.env(profile_.credential_ref); key && !key->empty()) {
      headers.emplace("Authorization", "Bearer " + *key);
    }
  }

  auto result = client.Post(path_prefix_ + path, headers, body, "application/json");
  if (!result) {
    throw GatewayError(classify_transport(result.error()),
                       "POST " + path + " failed: " + httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

std::string HttpGateway::post_with_retries(const std::string& path, const std::string& body,
                                           const std::string& request_hash,
                                           std::string_view event) {
  for (int attempt = 1;; ++attempt) {
    std::optional<GatewayError> failure;
    try {
      Response r = post_once(path, body);
      json line = {{"event", event},   {"model", profile_.model}, {"prompt_hash", request_hash},
                   {"attempt", attempt}, {"status", r.status}};
      if (r.status >= 200 && r.status < 300) {
        line["response_hash"] = sha256_hex(r.body);
        log(line.dump());
        return std::move(r.body);
      }
      log(line.dump());
      failure.emplace(classify_status(r.status),
                      "HTTP " + std::to_string(r.status) + " from " + path + ": " +
                          truncate(r.body, 200),
                      attempt);
    } catch (const GatewayError& e) {
      log(json{{"event", event},
               {"model", profile_.model},
               {"prompt_hash", request_hash},
               {"attempt", attempt},
               {"error", to_string(e.kind())}}
              .dump());
      failure.emplace(e.kind(), e.what(), attempt);
    }

    if (!failure->retryable()) throw GatewayError(failure->kind(), failure->what(), attempt);
    if (attempt >= profile_.max_attempts) {
      throw GatewayError(ErrorKind::ExhaustedRetries,
                         std::to_string(attempt) + " attempts; last: " + failure->what(), attempt);
    }
    {
      std::lock_guard lock(metrics_mu_);
      ++metrics_.retries;
    }
    options_.sleep(backoff_.delay(attempt - 1));
  }
}

ChatResult HttpGateway::chat_complete(std::span<const ChatTurn> messages,
                                      const CompletionParams& params) {
  if (messages.empty()) throw GatewayError(ErrorKind::InvalidArgument, "messages must be non-empty");

  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  json request = {{"model", profile_.model},
                  {"messages", std::move(msgs)},
                  {"temperature", params.temperature},
                  {"max_tokens", params.max_output_tokens}};
  if (params.seed) request["seed"] = *params.seed;

  {
    std::lock_guard lock(metrics_mu_);
    ++metrics_.chat_calls;
  }
  const std::string body =
      post_with_retries("/v1/chat/completions", request.dump(), prompt_hash(messages), "chat");

  json response = json::parse(body, nullptr, false);
  try {
    if (response.is_discarded()) throw std::runtime_error("body is not JSON");
    ChatResult result;
    const auto& content = response.at("choices").at(0).at("message").at("content");
    result.text = content.is_null() ? std::string() : content.get<std::string>();
    if (auto u = response.find("usage"); u != response.end() && u->is_object()) {
      result.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
      result.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
      result.usage.total_tokens = u->value("total_tokens", std::int64_t{0});
    }
    std::lock_guard lock(metrics_mu_);
    metrics_.prompt_tokens += result.usage.prompt_tokens;
    metrics_.completion_tokens += result.usage.completion_tokens;
    return result;
  } catch (const std::exception& e) {
    throw GatewayError(ErrorKind::BadResponse,
                       std::string("unexpected chat response: ") + e.what());
  }
}

std::vector<std::vector<float>> HttpGateway::embed_texts(std::span<const std::string> texts) {
  if (texts.empty()) throw GatewayError(ErrorKind::InvalidArgument, "texts must be non-empty");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw GatewayError(ErrorKind::InvalidArgument, "text " + std::to_string(i) + " is empty");
    }
  }
  {
    std::lock_guard lock(metrics_mu_);
    ++metrics_.embed_calls;
  }

  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  const std::size_t batch = static_cast<std::size_t>(profile_.embed_batch_size);
  for (std::size_t start = 0; start < texts.size(); start += batch) {
    const auto slice = texts.subspan(start, std::min(batch, texts.size() - start));
    json input = json::array();
    std::string digest_input;
    for (const auto& t : slice) {
      input.push_back(t);
      digest_input.append(t).push_back('\x1e');
    }
    const json request = {{"model", profile_.model}, {"input", std::move(input)}};
    const std::string body =
        post_with_retries("/v1/embeddings", request.dump(), sha256_hex(digest_input), "embed");

    json response = json::parse(body, nullptr, false);
    try {
      if (response.is_discarded()) throw std::runtime_error("body is not JSON");
      const auto& data = response.at("data");
      if (data.size() != slice.size()) throw std::runtime_error("embedding count mismatch");
      std::vector<std::vector<float>> batch_vectors(slice.size());
      for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t idx = data[i].contains("index") ? data[i].at("index").get<std::size_t>() : i;
        if (idx >= slice.size() || !batch_vectors[idx].empty()) {
          throw std::runtime_error("bad embedding index");
        }
        batch_vectors[idx] = data[i].at("embedding").get<std::vector<float>>();
      }
      for (auto& v : batch_vectors) {
        if (v.empty() || (!out.empty() && v.size() != out.front().size())) {
          throw std::runtime_error("inconsistent embedding dimension");
        }
        out.push_back(std::move(v));
      }
    } catch (const std::exception& e) {
      throw GatewayError(ErrorKind::BadResponse,
                         std::string("unexpected embeddings response: ") + e.what());
    }
  }
  return out;
}

}  // namespace ragds::gateway
