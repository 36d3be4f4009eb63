#include "paraeval/metrics_semantic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "paraeval/errors.hpp"
#include "paraeval/unicode.hpp"

namespace paraeval {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> tokens, std::vector<std::vector<double>> rows)
    : tokens_(std::move(tokens)) {
  if (rows.size() != tokens_.size()) {
    throw DataError("embedding has " + std::to_string(rows.size()) + " rows for " + std::to_string(tokens_.size()) +
                    " tokens");
  }
  dim_ = rows.empty() ? 0 : rows.front().size();
  if (!rows.empty() && dim_ == 0) throw DataError("embedding rows must have positive dimension");
  values_.reserve(rows.size() * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw DataError("embedding rows differ in dimension");
    for (double v : row) {
      if (!std::isfinite(v)) throw DataError("embedding contains a non-finite value");
      values_.push_back(v);
    }
  }
}

void EmbeddingMatrix::scale_row(std::size_t i, double factor) {
  for (std::size_t k = 0; k < dim_; ++k) values_[i * dim_ + k] *= factor;
}

BertScoreTriple greedy_bertscore(const EmbeddingMatrix& original, const EmbeddingMatrix& candidate) {
  if (original.empty() || candidate.empty()) throw DataError("BERTScore needs non-empty embeddings");
  if (original.dim() != candidate.dim()) {
    throw DataError("embedding dimensions differ (" + std::to_string(original.dim()) + " vs " +
                    std::to_string(candidate.dim()) + ")");
  }

  const auto norms = [](const EmbeddingMatrix& m) {
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double sq = 0.0;
      for (double v : m.row(i)) sq += v * v;
      out[i] = std::sqrt(sq);
    }
    return out;
  };
  const std::vector<double> x_norm = norms(original);
  const std::vector<double> y_norm = norms(candidate);

  constexpr double kLowest = -std::numeric_limits<double>::infinity();
  std::vector<double> best_for_x(original.rows(), kLowest);
  std::vector<double> best_for_y(candidate.rows(), kLowest);
  for (std::size_t i = 0; i < original.rows(); ++i) {
    const auto xi = original.row(i);
    for (std::size_t j = 0; j < candidate.rows(); ++j) {
      double sim = 0.0;
      if (x_norm[i] > 0.0 && y_norm[j] > 0.0) {
        const auto yj = candidate.row(j);
        double dot = 0.0;
        for (std::size_t k = 0; k < xi.size(); ++k) dot += xi[k] * yj[k];
        sim = std::clamp(dot / (x_norm[i] * y_norm[j]), -1.0, 1.0);
      }
      best_for_x[i] = std::max(best_for_x[i], sim);
      best_for_y[j] = std::max(best_for_y[j], sim);
    }
  }

  const auto mean = [](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
  };
  BertScoreTriple out;
  out.recall = mean(best_for_x);
  out.precision = mean(best_for_y);
  const double sum = out.precision + out.recall;
  out.f1 = sum != 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

EmbeddingMatrix embed(EmbeddingProvider& provider, std::string_view text) {
  if (unicode::trim(text).empty()) throw DataError("cannot embed empty text");
  EmbeddingMatrix m = provider.embed_text(std::string(text));
  if (m.empty()) throw TextRejected("provider '" + provider.identity() + "' returned no tokens for: " + std::string(text));
  return m;
}

nlohmann::json to_json(const StoredEmbedding& entry) {
  nlohmann::json vectors = nlohmann::json::array();
  for (std::size_t i = 0; i < entry.matrix.rows(); ++i) {
    const auto row = entry.matrix.row(i);
    vectors.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"text", entry.text},
          {"model", entry.model},
          {"dim", entry.matrix.dim()},
          {"tokens", entry.matrix.tokens()},
          {"vectors", std::move(vectors)}};
}

StoredEmbedding stored_embedding_from_json(const nlohmann::json& record) {
  try {
    StoredEmbedding entry;
    entry.text = record.at("text").get<std::string>();
    entry.model = record.at("model").get<std::string>();
    const auto dim = record.at("dim").get<std::size_t>();
    auto tokens = record.at("tokens").get<std::vector<std::string>>();
    auto rows = record.at("vectors").get<std::vector<std::vector<double>>>();
    entry.matrix = EmbeddingMatrix(std::move(tokens), std::move(rows));
    if (!entry.matrix.empty() && entry.matrix.dim() != dim) {
      throw DataError("declared dim " + std::to_string(dim) + " does not match vectors");
    }
    return entry;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed embedding record: ") + e.what());
  }
}

}  // namespace paraeval
