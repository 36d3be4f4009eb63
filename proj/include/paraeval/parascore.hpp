#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "paraeval/dataset_io.hpp"
#include "paraeval/metrics_semantic.hpp"

namespace paraeval {

struct ParaScoreConfig {
  /// NLD cap; divergence beyond gamma earns no extra credit.
  double gamma = 0.35;
  /// Weight of the divergence term.
  double omega = 0.5;
  /// Minimum score for a variant to be kept.
  double threshold = 0.7;
  /// Identity of the embedding provider the scores were computed with.
  std::string provider_identity;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  /// 1 + omega * gamma; 1.175 with the defaults.
  double max_score() const noexcept { return 1.0 + omega * gamma; }
};

/// (f1 + omega * min(nld, gamma)) / (1 + omega * gamma).
double combine_parascore(double bertscore_f1, double nld, const ParaScoreConfig& cfg) noexcept;

/// Scores paraphrase `x_hat` of `x`. Throws DataError on empty input and
/// propagates provider errors.
VariantScore parascore(std::string_view x, std::string_view x_hat, const ParaScoreConfig& cfg,
                       EmbeddingProvider& provider);

/// Returns `set` with one score per variant and `mean_parascore` filled.
/// Requires a complete set; a failing variant aborts with its index in the
/// message, keeping the original exception type.
ParaphraseSet score_set(const Utterance& utt, ParaphraseSet set, const ParaScoreConfig& cfg,
                        EmbeddingProvider& provider);

/// Variants with parascore >= threshold, in stored order, with their indices.
std::vector<std::pair<std::size_t, std::string>> filter_threshold(const ParaphraseSet& set, double threshold);

struct HistogramBin {
  double start = 0.0;
  double end = 0.0;
  std::size_t count = 0;
};

struct DistributionSummary {
  std::size_t count = 0;
  double mean = 0.0;
  /// Population standard deviation.
  double std = 0.0;
  std::vector<HistogramBin> histogram;
  /// Keys 0.25, 0.5 and 0.75; linear interpolation between order statistics.
  std::map<double, double> percentiles;
};

inline constexpr double kDefaultBinWidth = 0.02;

/// Bins are [k*w, (k+1)*w) aligned to multiples of the width, spanning the
/// bins that contain min and max; the last bin is closed on the right.
DistributionSummary summarize(std::vector<double> scores, double bin_width = kDefaultBinWidth);

/// Writes `bin_start,bin_end,count` rows to `histogram_csv` and a
/// `mean,std,p25,p50,p75,count` row to `summary_csv`, each with a header.
void write_distribution_csv(const DistributionSummary& summary, const std::filesystem::path& histogram_csv,
                            const std::filesystem::path& summary_csv);

}  // namespace paraeval
