#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace paraeval {

/// Per-token contextual embeddings of one text, stored row-major.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Throws DataError unless every row has `dim` finite entries and there is
  /// one row per token.
  EmbeddingMatrix(std::vector<std::string> tokens, std::vector<std::vector<double>> rows);

  std::size_t rows() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * dim_, dim_}; }
  /// Multiplies row `i` by `factor`.
  void scale_row(std::size_t i, double factor);

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
};

struct BertScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Greedy cosine matching. Recall averages, over the original's tokens, the
/// best similarity to any candidate token; precision does the same over the
/// candidate's tokens. A zero-norm row has similarity 0 to everything.
BertScoreTriple greedy_bertscore(const EmbeddingMatrix& original, const EmbeddingMatrix& candidate);

/// Source of token embeddings. Implementations must tolerate concurrent
/// `embed_text` calls. Boundary tokens such as [CLS]/[SEP] are never part of
/// the returned matrix.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// Model name, layer and revision; scores are comparable only within one
  /// identity.
  virtual std::string identity() const = 0;
  /// Throws ProviderUnavailable or TextRejected.
  virtual EmbeddingMatrix embed_text(const std::string& text) = 0;
};

/// Validating entry point: rejects empty text before consulting the provider.
EmbeddingMatrix embed(EmbeddingProvider& provider, std::string_view text);

/// One line of a file-backed store.
struct StoredEmbedding {
  std::string text;
  std::string model;
  EmbeddingMatrix matrix;
};

nlohmann::json to_json(const StoredEmbedding& entry);
StoredEmbedding stored_embedding_from_json(const nlohmann::json& record);

/// Lookup table of precomputed matrices keyed by exact text.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  /// All entries must share one model name.
  explicit FileEmbeddingProvider(std::vector<StoredEmbedding> entries);
  static FileEmbeddingProvider load(const std::filesystem::path& path);
  static void save(std::span<const StoredEmbedding> entries, const std::filesystem::path& path);

  std::string identity() const override { return model_; }
  EmbeddingMatrix embed_text(const std::string& text) override;
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::string model_;
  std::unordered_map<std::string, EmbeddingMatrix> table_;
};

struct ServiceProviderOptions {
  /// Base URL, e.g. "http://127.0.0.1:8080".
  std::string url;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;
  /// Sent with each request when non-empty; the service rejects mismatches.
  std::string model_hint;
};

/// Client for the embedding service (`GET /health`, `POST /embed`).
class ServiceEmbeddingProvider final : public EmbeddingProvider {
 public:
  /// Queries /health; throws ProviderUnavailable if the service is down or
  /// still loading.
  explicit ServiceEmbeddingProvider(ServiceProviderOptions options);

  std::string identity() const override { return identity_; }
  std::size_t dim() const noexcept { return dim_; }
  EmbeddingMatrix embed_text(const std::string& text) override;
  /// One request for several texts; results are in input order.
  std::vector<EmbeddingMatrix> embed_batch(const std::vector<std::string>& texts);

 private:
  ServiceProviderOptions options_;
  std::string identity_;
  std::size_t dim_ = 0;
  std::counting_semaphore<> in_flight_;
};

/// Bounded LRU cache keyed by (identity, text) in front of another provider.
class CachingEmbeddingProvider final : public EmbeddingProvider {
 public:
  CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, std::size_t capacity);

  std::string identity() const override { return inner_->identity(); }
  EmbeddingMatrix embed_text(const std::string& text) override;

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t size() const;

 private:
  using Entry = std::pair<std::string, EmbeddingMatrix>;

  std::shared_ptr<EmbeddingProvider> inner_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> lru_;
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace paraeval
