#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "paraeval/dataset_io.hpp"
#include "paraeval/errors.hpp"
#include "paraeval/metrics_semantic.hpp"

namespace paraeval {

using nlohmann::json;

// ---------------------------------------------------------------------------
// File-backed store

FileEmbeddingProvider::FileEmbeddingProvider(std::vector<StoredEmbedding> entries) {
  for (auto& entry : entries) {
    if (model_.empty()) {
      model_ = entry.model;
    } else if (entry.model != model_) {
      throw DataError("embedding store mixes models '" + model_ + "' and '" + entry.model + "'");
    }
    if (!table_.empty() && !entry.matrix.empty() && entry.matrix.dim() != table_.begin()->second.dim()) {
      throw DataError("embedding store mixes dimensions");
    }
    table_.insert_or_assign(std::move(entry.text), std::move(entry.matrix));
  }
}

FileEmbeddingProvider FileEmbeddingProvider::load(const std::filesystem::path& path) {
  std::vector<StoredEmbedding> entries;
  for (const auto& record : read_jsonl(path)) entries.push_back(stored_embedding_from_json(record));
  return FileEmbeddingProvider(std::move(entries));
}

void FileEmbeddingProvider::save(std::span<const StoredEmbedding> entries, const std::filesystem::path& path) {
  std::vector<json> lines;
  lines.reserve(entries.size());
  for (const auto& entry : entries) lines.push_back(to_json(entry));
  write_jsonl(path, lines);
}

EmbeddingMatrix FileEmbeddingProvider::embed_text(const std::string& text) {
  const auto it = table_.find(text);
  if (it == table_.end()) throw TextRejected("text not present in embedding store '" + model_ + "': " + text);
  return it->second;
}

// ---------------------------------------------------------------------------
// Service client

namespace {

httplib::Client make_client(const std::string& origin, std::chrono::milliseconds timeout) {
  httplib::Client client(origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  return client;
}

std::string diagnostic_of(const std::string& body) {
  try {
    const json j = json::parse(body);
    if (j.contains("error")) return j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
  } catch (const json::exception&) {
  }
  return body;
}

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

ServiceEmbeddingProvider::ServiceEmbeddingProvider(ServiceProviderOptions options)
    : options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options_.max_in_flight))) {
  const auto url = detail::split_url(options_.url);
  auto client = make_client(url.origin, options_.timeout);
  const auto res = client.Get(url.path + "/health");
  if (!res) {
    throw ProviderUnavailable("embedding service unreachable at " + options_.url + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderUnavailable("embedding service not ready (HTTP " + std::to_string(res->status) +
                              "): " + diagnostic_of(res->body));
  }
  try {
    const json health = json::parse(res->body);
    identity_ = health.at("model").get<std::string>();
    dim_ = health.at("dim").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ProviderUnavailable(std::string("malformed /health response: ") + e.what());
  }
  if (identity_.empty()) throw ProviderUnavailable("embedding service reported an empty model identity");
  if (!options_.model_hint.empty() && options_.model_hint != identity_) {
    throw ProviderUnavailable("embedding service serves '" + identity_ + "', expected '" + options_.model_hint + "'");
  }
}

EmbeddingMatrix ServiceEmbeddingProvider::embed_text(const std::string& text) {
  return std::move(embed_batch({text}).front());
}

std::vector<EmbeddingMatrix> ServiceEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
  json request = {{"texts", texts}};
  if (!options_.model_hint.empty()) request["model"] = options_.model_hint;

  const auto url = detail::split_url(options_.url);
  httplib::Result res;
  {
    SlotGuard slot(in_flight_);
    auto client = make_client(url.origin, options_.timeout);
    res = client.Post(url.path + "/embed", request.dump(), "application/json");
  }
  if (!res) {
    throw ProviderUnavailable("embedding service unreachable at " + options_.url + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 400 || res->status == 413) {
    throw TextRejected("embedding service rejected request (HTTP " + std::to_string(res->status) +
                       "): " + diagnostic_of(res->body));
  }
  if (res->status != 200) {
    throw ProviderUnavailable("embedding service error (HTTP " + std::to_string(res->status) +
                              "): " + diagnostic_of(res->body));
  }

  std::vector<EmbeddingMatrix> out;
  try {
    const json body = json::parse(res->body);
    if (body.at("model").get<std::string>() != identity_) {
      throw ProviderUnavailable("embedding service identity changed from '" + identity_ + "' to '" +
                                body.at("model").get<std::string>() + "'");
    }
    const json& results = body.at("results");
    if (results.size() != texts.size()) {
      throw ProviderUnavailable("embedding service returned " + std::to_string(results.size()) + " results for " +
                                std::to_string(texts.size()) + " texts");
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
      const json& item = results[i];
      if (item.contains("error")) {
        throw TextRejected("embedding service rejected text #" + std::to_string(i) + ": " +
                           item["error"].get<std::string>());
      }
      out.emplace_back(item.at("tokens").get<std::vector<std::string>>(),
                       item.at("vectors").get<std::vector<std::vector<double>>>());
      if (!out.back().empty() && out.back().dim() != dim_) {
        throw ProviderUnavailable("embedding service returned dimension " + std::to_string(out.back().dim()) +
                                  ", expected " + std::to_string(dim_));
      }
    }
  } catch (const json::exception& e) {
    throw ProviderUnavailable(std::string("malformed /embed response: ") + e.what());
  } catch (const DataError& e) {
    throw ProviderUnavailable(std::string("malformed /embed response: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// LRU cache

CachingEmbeddingProvider::CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, std::size_t capacity)
    : inner_(std::move(inner)), capacity_(capacity) {
  if (!inner_) throw ConfigError("caching provider needs an inner provider");
}

EmbeddingMatrix CachingEmbeddingProvider::embed_text(const std::string& text) {
  const std::string key = inner_->identity() + '\x1f' + text;
  {
    std::lock_guard lock(mutex_);
    if (const auto it = index_.find(key); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      ++hits_;
      return it->second->second;
    }
    ++misses_;
  }

  // Computed outside the lock; a concurrent miss on the same key just
  // embeds twice and stores the same value.
  EmbeddingMatrix matrix = inner_->embed_text(text);

  std::lock_guard lock(mutex_);
  if (capacity_ == 0) return matrix;
  if (const auto it = index_.find(key); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  lru_.emplace_front(key, matrix);
  index_[key] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return matrix;
}

std::size_t CachingEmbeddingProvider::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t CachingEmbeddingProvider::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t CachingEmbeddingProvider::size() const {
  std::lock_guard lock(mutex_);
  return lru_.size();
}

}  // namespace paraeval
