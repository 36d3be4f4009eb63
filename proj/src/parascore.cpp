#include "paraeval/parascore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "paraeval/errors.hpp"
#include "paraeval/metrics_lexical.hpp"
#include "paraeval/unicode.hpp"

namespace paraeval {

void ParaScoreConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError(fmt::format("gamma must be in (0, 1], got {}", gamma));
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError(fmt::format("omega must be >= 0, got {}", omega));
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError(fmt::format("threshold must be in [0, 1], got {}", threshold));
  }
}

double combine_parascore(double bertscore_f1, double nld, const ParaScoreConfig& cfg) noexcept {
  return (bertscore_f1 + cfg.omega * std::min(nld, cfg.gamma)) / cfg.max_score();
}

VariantScore parascore(std::string_view x, std::string_view x_hat, const ParaScoreConfig& cfg,
                       EmbeddingProvider& provider) {
  if (unicode::trim(x).empty() || unicode::trim(x_hat).empty()) throw DataError("ParaScore needs two non-empty texts");
  VariantScore out;
  out.bertscore_f1 = greedy_bertscore(embed(provider, x), embed(provider, x_hat)).f1;
  out.nld = nld(x, x_hat);
  out.parascore = combine_parascore(out.bertscore_f1, out.nld, cfg);
  return out;
}

namespace {

template <typename E>
[[noreturn]] void rethrow_for_variant(const E& e, const std::string& utterance_id, std::size_t index) {
  throw E(fmt::format("utterance {} variant {}: {}", utterance_id, index, e.what()));
}

}  // namespace

ParaphraseSet score_set(const Utterance& utt, ParaphraseSet set, const ParaScoreConfig& cfg,
                        EmbeddingProvider& provider) {
  if (set.status != SetStatus::complete || set.variants.empty()) {
    throw DataError("cannot score incomplete paraphrase set for utterance " + set.utterance_id);
  }
  std::vector<VariantScore> scores;
  scores.reserve(set.variants.size());
  for (std::size_t i = 0; i < set.variants.size(); ++i) {
    try {
      scores.push_back(parascore(utt.text, set.variants[i], cfg, provider));
    } catch (const ProviderUnavailable& e) {
      rethrow_for_variant(e, set.utterance_id, i);
    } catch (const TextRejected& e) {
      rethrow_for_variant(e, set.utterance_id, i);
    } catch (const DataError& e) {
      rethrow_for_variant(e, set.utterance_id, i);
    }
  }
  double sum = 0.0;
  for (const auto& s : scores) sum += s.parascore;
  set.mean_parascore = sum / static_cast<double>(scores.size());
  set.scores = std::move(scores);
  return set;
}

std::vector<std::pair<std::size_t, std::string>> filter_threshold(const ParaphraseSet& set, double threshold) {
  if (!set.scores) throw DataError("paraphrase set for utterance " + set.utterance_id + " is unscored");
  if (set.scores->size() != set.variants.size()) {
    throw DataError("paraphrase set for utterance " + set.utterance_id + " has mismatched scores");
  }
  std::vector<std::pair<std::size_t, std::string>> kept;
  for (std::size_t i = 0; i < set.variants.size(); ++i) {
    if ((*set.scores)[i].parascore >= threshold) kept.emplace_back(i, set.variants[i]);
  }
  return kept;
}

namespace {

// numpy.percentile's default "linear" method on sorted data.
double percentile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

DistributionSummary summarize(std::vector<double> scores, double bin_width) {
  if (scores.empty()) throw DataError("cannot summarize an empty score list");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ConfigError("bin width must be positive");
  for (double s : scores) {
    if (!std::isfinite(s)) throw DataError("cannot summarize non-finite scores");
  }
  std::sort(scores.begin(), scores.end());

  DistributionSummary out;
  out.count = scores.size();
  const double n = static_cast<double>(scores.size());
  out.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double sq = 0.0;
  for (double s : scores) sq += (s - out.mean) * (s - out.mean);
  out.std = std::sqrt(sq / n);
  for (double q : {0.25, 0.5, 0.75}) out.percentiles[q] = percentile_sorted(scores, q);

  const auto bin_of = [&](double v) { return static_cast<long long>(std::floor(v / bin_width)); };
  const long long first = bin_of(scores.front());
  long long last = bin_of(scores.back());
  // A maximum that sits exactly on a bin edge belongs to the closed last bin.
  if (last > first && static_cast<double>(last) * bin_width >= scores.back()) --last;
  for (long long b = first; b <= last; ++b) {
    out.histogram.push_back({static_cast<double>(b) * bin_width, static_cast<double>(b + 1) * bin_width, 0});
  }
  for (double s : scores) {
    const long long b = std::clamp(bin_of(s), first, last);
    ++out.histogram[static_cast<std::size_t>(b - first)].count;
  }
  return out;
}

void write_distribution_csv(const DistributionSummary& summary, const std::filesystem::path& histogram_csv,
                            const std::filesystem::path& summary_csv) {
  std::ofstream hist(histogram_csv);
  if (!hist) throw IoError("cannot write " + histogram_csv.string());
  hist << "bin_start,bin_end,count\n";
  for (const auto& bin : summary.histogram) hist << fmt::format("{:.6g},{:.6g},{}\n", bin.start, bin.end, bin.count);

  std::ofstream sum(summary_csv);
  if (!sum) throw IoError("cannot write " + summary_csv.string());
  sum << "mean,std,p25,p50,p75,count\n";
  sum << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{}\n", summary.mean, summary.std,
                     summary.percentiles.at(0.25), summary.percentiles.at(0.5), summary.percentiles.at(0.75),
                     summary.count);
  if (!hist || !sum) throw IoError("failed writing distribution CSV");
}

}  // namespace paraeval
