#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "paraeval/analysis.hpp"
#include "paraeval/errors.hpp"

namespace paraeval {
namespace {

// Rank of each value by exhaustive comparison: 1 + #smaller + (#equal - 1) / 2.
std::vector<double> brute_force_ranks(const std::vector<double>& v) {
  std::vector<double> ranks;
  for (double x : v) {
    double smaller = 0, equal = 0;
    for (double y : v) {
      smaller += y < x;
      equal += y == x;
    }
    ranks.push_back(1.0 + smaller + (equal - 1.0) / 2.0);
  }
  return ranks;
}

double textbook_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

using V = std::vector<double>;

TEST(Pearson, ClosedForms) {
  EXPECT_NEAR(pearson(V{1, 2, 3}, V{2, 4, 6}), 1.0, 1e-15);
  EXPECT_NEAR(pearson(V{1, 2, 3}, V{3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4}), 0.8, 1e-12);
}

TEST(Pearson, DegenerateInputsThrow) {
  EXPECT_THROW(pearson(V{1, 2}, V{1, 2, 3}), DataError);
  EXPECT_THROW(pearson(V{1}, V{1}), DataError);
  EXPECT_THROW(pearson(V{1, 1, 1}, V{1, 2, 3}), DataError);
  EXPECT_THROW(pearson(V{1, 2, std::nan("")}, V{1, 2, 3}), DataError);
}

TEST(Spearman, ClosedForms) {
  EXPECT_NEAR(spearman(V{1, 2, 3, 4}, V{1, 5, 50, 51}), 1.0, 1e-15);
  EXPECT_NEAR(spearman(V{1, 2, 3}, V{9, 4, 1}), -1.0, 1e-15);
}

TEST(Spearman, TieCaseMatchesBruteForceRanks) {
  const V x = {1, 2, 2, 3}, y = {1, 2, 3, 4};
  EXPECT_EQ(average_ranks(x), brute_force_ranks(x));
  const double expected = textbook_pearson(brute_force_ranks(x), brute_force_ranks(y));
  EXPECT_NEAR(expected, std::sqrt(0.9), 1e-12);
  EXPECT_NEAR(spearman(x, y), expected, 1e-12);
}

TEST(Spearman, RandomTiesMatchOracle) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> small(0, 4);
  for (int t = 0; t < 200; ++t) {
    V x(10), y(10);
    for (auto& v : x) v = small(rng);
    for (auto& v : y) v = small(rng);
    if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) continue;
    if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) continue;
    EXPECT_EQ(average_ranks(x), brute_force_ranks(x));
    EXPECT_NEAR(spearman(x, y), textbook_pearson(brute_force_ranks(x), brute_force_ranks(y)), 1e-12);
  }
}

TEST(Correlation, SymmetryAndInvariances) {
  std::mt19937 rng(8);
  std::normal_distribution<double> dist;
  V x(30), y(30);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = dist(rng);
    y[i] = x[i] + dist(rng);
  }
  EXPECT_NEAR(pearson(x, y), pearson(y, x), 1e-15);
  V affine = x, cubed = x;
  for (auto& v : affine) v = 3.0 * v + 7.0;
  for (auto& v : cubed) v = v * v * v;
  EXPECT_NEAR(pearson(affine, y), pearson(x, y), 1e-12);
  EXPECT_NEAR(spearman(cubed, y), spearman(x, y), 1e-12);
  EXPECT_NEAR(spearman(x, y), pearson(average_ranks(x), average_ranks(y)), 1e-15);
}

TEST(Extremes, StrictThresholds) {
  using Item = std::pair<std::string, double>;
  const std::vector<Item> items = {{"a", 2}, {"b", 10}, {"c", 20}, {"d", 5}, {"e", 15}, {"f", 4.999}, {"g", 15.001}};
  EXPECT_EQ(extremes_subset(items), (std::vector<std::string>{"a", "c", "f", "g"}));
  const std::vector<Item> middle = {{"x", 5}, {"y", 10}, {"z", 15}};
  EXPECT_TRUE(extremes_subset(middle).empty());
  EXPECT_THROW(extremes_subset(items, 15, 5), ConfigError);
}

std::vector<HumanRating> ratings_for(const std::vector<std::pair<std::string, double>>& v) {
  std::vector<HumanRating> out;
  for (const auto& [id, r] : v) out.push_back({id, r, 6});
  return out;
}

TEST(Correlate, AlignsByIdAndLabelsSubset) {
  const auto ratings = ratings_for({{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}});
  const std::unordered_map<std::string, double> scores = {{"d", 4.0}, {"c", 3.0}, {"b", 2.0}, {"a", 1.0}, {"z", 9.0}};
  const auto all = correlate(ratings, scores, std::nullopt, "bleu");
  EXPECT_NEAR(all.pearson_r, 1.0, 1e-15);
  EXPECT_NEAR(all.spearman_rho, 1.0, 1e-15);
  EXPECT_EQ(all.n, 4u);
  EXPECT_EQ(all.subset, Subset::all);

  const auto sub = correlate(ratings, scores, std::vector<std::string>{"a", "c", "d"}, "bleu");
  EXPECT_EQ(sub.n, 3u);
  EXPECT_EQ(sub.subset, Subset::extremes);

  const auto j = to_json(sub);
  EXPECT_EQ(j.at("metric"), "bleu");
  EXPECT_EQ(j.at("subset"), "extremes");
  EXPECT_EQ(j.at("n"), 3);
}

TEST(Correlate, MissingScoresAndDegenerateSubsets) {
  const auto ratings = ratings_for({{"a", 1.0}, {"b", 2.0}, {"c", 3.0}});
  const std::unordered_map<std::string, double> partial = {{"a", 1.0}};
  try {
    correlate(ratings, partial);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("c"), std::string::npos);
  }
  const std::unordered_map<std::string, double> full = {{"a", 1.0}, {"b", 5.0}, {"c", 2.0}};
  EXPECT_THROW(correlate(ratings, full, std::vector<std::string>{"a"}), DataError);
}

TEST(CorrelationTable, PrintsUnavailableExtremes) {
  CorrelationRow row{{"bleu_para", 0.5, 0.4, 10, Subset::all}, std::nullopt};
  const std::vector<CorrelationRow> rows = {row};
  const auto table = format_correlation_table(rows);
  EXPECT_NE(table.find("bleu_para"), std::string::npos);
  EXPECT_NE(table.find("n/a"), std::string::npos);
  EXPECT_NE(table.find("Spearman"), std::string::npos);
}

}  // namespace
}  // namespace paraeval
