#include "paraeval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "paraeval/errors.hpp"

namespace paraeval {
namespace {

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DataError(fmt::format("correlation inputs differ in length ({} vs {})", x.size(), y.size()));
  }
  if (x.size() < 2) throw DataError("correlation needs at least two items");
  for (std::span<const double> v : {x, y}) {
    for (double value : v) {
      if (!std::isfinite(value)) throw DataError("correlation input contains a non-finite value");
    }
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("correlation undefined for a constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean 1-based rank.
    const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::vector<std::string> extremes_subset(std::span<const std::pair<std::string, double>> items, double low,
                                         double high) {
  if (!(low < high)) throw ConfigError(fmt::format("extremes bounds must satisfy low < high, got {} and {}", low, high));
  std::vector<std::string> out;
  for (const auto& [id, score] : items) {
    if (score < low || score > high) out.push_back(id);
  }
  return out;
}

std::string_view to_string(Subset subset) noexcept { return subset == Subset::all ? "all" : "extremes"; }

CorrelationReport correlate(std::span<const HumanRating> ratings,
                            const std::unordered_map<std::string, double>& metric_scores,
                            const std::optional<std::vector<std::string>>& subset_ids, std::string metric_name) {
  std::vector<std::string> missing;
  for (const auto& r : ratings) {
    if (!metric_scores.contains(r.instance_id)) missing.push_back(r.instance_id);
  }
  if (!missing.empty()) {
    throw DataError(fmt::format("no metric score for rated ids: {}", fmt::join(missing, ", ")));
  }

  std::unordered_set<std::string> keep;
  if (subset_ids) keep.insert(subset_ids->begin(), subset_ids->end());
  std::vector<double> human, metric;
  for (const auto& r : ratings) {
    if (subset_ids && !keep.contains(r.instance_id)) continue;
    human.push_back(r.mean_rating);
    metric.push_back(metric_scores.at(r.instance_id));
  }

  CorrelationReport report;
  report.metric_name = std::move(metric_name);
  report.subset = subset_ids ? Subset::extremes : Subset::all;
  report.n = human.size();
  if (report.n < 2) {
    throw DataError(fmt::format("{} subset has {} rated items; at least two are needed", to_string(report.subset),
                                report.n));
  }
  report.pearson_r = pearson(metric, human);
  report.spearman_rho = spearman(metric, human);
  return report;
}

nlohmann::json to_json(const CorrelationReport& report) {
  return {{"metric", report.metric_name},
          {"subset", to_string(report.subset)},
          {"n", report.n},
          {"pearson_r", report.pearson_r},
          {"spearman_rho", report.spearman_rho}};
}

std::string format_correlation_table(std::span<const CorrelationRow> rows) {
  std::string out = fmt::format("{:<12}{:>12}{:>14}{:>18}\n", "Metric", "Pearson r", "Spearman rho",
                                "rho (extremes)");
  for (const auto& row : rows) {
    const std::string extremes =
        row.extremes ? fmt::format("{:.3f} (n={})", row.extremes->spearman_rho, row.extremes->n) : "n/a";
    out += fmt::format("{:<12}{:>12.3f}{:>14.3f}{:>18}\n", row.all.metric_name, row.all.pearson_r,
                       row.all.spearman_rho, extremes);
  }
  return out;
}

}  // namespace paraeval
