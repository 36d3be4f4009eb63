#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "paraeval/dataset_io.hpp"

namespace paraeval {

/// Sample Pearson correlation. Throws DataError on length mismatch, fewer
/// than two items, non-finite values or a constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Same errors as pearson.
double spearman(std::span<const double> x, std::span<const double> y);

inline constexpr double kExtremesLow = 5.0;
inline constexpr double kExtremesHigh = 15.0;

/// Ids whose score is strictly below `low` or strictly above `high`.
std::vector<std::string> extremes_subset(std::span<const std::pair<std::string, double>> items,
                                         double low = kExtremesLow, double high = kExtremesHigh);

enum class Subset { all, extremes };
std::string_view to_string(Subset subset) noexcept;

struct CorrelationReport {
  std::string metric_name;
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n = 0;
  Subset subset = Subset::all;
};

/// Correlates mean human ratings with metric scores aligned by id, optionally
/// restricted to `subset_ids`. Throws DataError naming every rated id that
/// lacks a score, or when fewer than two items remain.
CorrelationReport correlate(std::span<const HumanRating> ratings,
                            const std::unordered_map<std::string, double>& metric_scores,
                            const std::optional<std::vector<std::string>>& subset_ids = std::nullopt,
                            std::string metric_name = {});

nlohmann::json to_json(const CorrelationReport& report);

/// One row of the correlation table; a missing extremes entry prints as n/a.
struct CorrelationRow {
  CorrelationReport all;
  std::optional<CorrelationReport> extremes;
};

/// Columns: Metric, Pearson r, Spearman rho, rho (extremes).
std::string format_correlation_table(std::span<const CorrelationRow> rows);

}  // namespace paraeval
