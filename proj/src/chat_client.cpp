#include "paraeval/chat_client.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "http_util.hpp"
#include "paraeval/errors.hpp"

namespace paraeval {

nlohmann::json chat_request_json(const ChatRequest& request) {
  nlohmann::json body = {
      {"model", request.model},
      {"messages",
       {{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", request.user}}}},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
  };
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

std::string parse_chat_response(std::string_view body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError("chat response content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
}

OpenAIChatClient::OpenAIChatClient(OpenAIChatOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw ConfigError("chat endpoint is not configured");
  auto url = detail::split_url(options_.endpoint);
  origin_ = std::move(url.origin);
  path_ = url.path.empty() ? "/" : std::move(url.path);
}

namespace {

bool retryable_status(int status) { return status == 408 || status == 409 || status == 429 || status >= 500; }

std::optional<std::chrono::milliseconds> retry_after(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return std::nullopt;
  const std::string value = res.get_header_value("Retry-After");
  double seconds = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seconds);
  if (ec != std::errc() || ptr == value.data() || seconds < 0.0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

}  // namespace

std::string OpenAIChatClient::complete(const ChatRequest& request) {
  const std::string payload = chat_request_json(request).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::chrono::milliseconds backoff = options_.initial_backoff;
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= options_.transport_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::debug("chat request retry {}/{} after {} ms: {}", attempt, options_.transport_retries, backoff.count(),
                    last_error);
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, options_.max_backoff);
    }

    httplib::Client client(origin_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    const auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return parse_chat_response(res->body);
    last_error = "HTTP " + std::to_string(res->status);
    if (!retryable_status(res->status)) throw TransportError("chat endpoint returned " + last_error);
    if (const auto wait = retry_after(*res)) backoff = std::min(std::max(backoff, *wait), options_.max_backoff);
  }
  throw TransportError("chat endpoint failed after " + std::to_string(options_.transport_retries + 1) +
                       " attempts: " + last_error);
}

}  // namespace paraeval
