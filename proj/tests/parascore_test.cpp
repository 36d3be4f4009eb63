#include <random>

#include <gtest/gtest.h>

#include "paraeval/errors.hpp"
#include "paraeval/parascore.hpp"
#include "support.hpp"

namespace paraeval {
namespace {

using testing::TempDir;
using testing::word_hash_embedding;

class HashProvider final : public EmbeddingProvider {
 public:
  std::string identity() const override { return "hash@8"; }
  EmbeddingMatrix embed_text(const std::string& text) override { return word_hash_embedding(text); }
};

class FailingProvider final : public EmbeddingProvider {
 public:
  explicit FailingProvider(std::string bad) : bad_(std::move(bad)) {}
  std::string identity() const override { return "failing"; }
  EmbeddingMatrix embed_text(const std::string& text) override {
    if (text == bad_) throw TextRejected("refused");
    return word_hash_embedding(text);
  }

 private:
  std::string bad_;
};

TEST(ParaScore, ClosedForms) {
  const ParaScoreConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.max_score(), 1.175);
  EXPECT_NEAR(combine_parascore(1.0, 0.0, cfg), 0.851064, 1e-6);
  EXPECT_NEAR(combine_parascore(0.9, 0.5, cfg), 0.914894, 1e-6);
  EXPECT_NEAR(combine_parascore(0.9, 0.2, cfg), 0.851064, 1e-6);
  EXPECT_NEAR(combine_parascore(1.0, 1.0, cfg), 1.0, 1e-15);
}

TEST(ParaScore, IdenticalPairThroughProvider) {
  HashProvider provider;
  const auto s = parascore("The dog ran across the park.", "The dog ran across the park.", {}, provider);
  EXPECT_NEAR(s.bertscore_f1, 1.0, 1e-12);
  EXPECT_EQ(s.nld, 0.0);
  EXPECT_NEAR(s.parascore, 1.0 / 1.175, 1e-12);
  EXPECT_THROW(parascore("", "x y", {}, provider), DataError);
}

TEST(ParaScore, CapSaturationAndMonotonicity) {
  const ParaScoreConfig cfg;
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> f1(0.0, 1.0), above(0.35, 1.0), below(0.0, 0.35);
  for (int t = 0; t < 1000; ++t) {
    const double f_a = f1(rng), f_b = f1(rng);
    const double diff = combine_parascore(f_a, above(rng), cfg) - combine_parascore(f_b, above(rng), cfg);
    EXPECT_NEAR(diff, (f_a - f_b) / 1.175, 1e-15);
    const double n1 = below(rng), n2 = below(rng);
    EXPECT_LE(combine_parascore(f_a, std::min(n1, n2), cfg), combine_parascore(f_a, std::max(n1, n2), cfg));
  }
}

TEST(ParaScoreConfig, Validation) {
  ParaScoreConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gamma = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.omega = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.threshold = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

ParaphraseSet complete_set(std::vector<std::string> variants) {
  ParaphraseSet set;
  set.utterance_id = "u1";
  set.generator = "g";
  set.status = SetStatus::complete;
  set.variants = std::move(variants);
  return set;
}

TEST(ScoreSet, IdenticalVariants) {
  HashProvider provider;
  const Utterance utt{"u1", "v", 0, "The dog ran across the park.", {}};
  const auto scored = score_set(utt, complete_set(std::vector<std::string>(5, utt.text)), {}, provider);
  ASSERT_TRUE(scored.scores);
  for (const auto& s : *scored.scores) EXPECT_NEAR(s.parascore, 0.851064, 1e-6);
  EXPECT_NEAR(*scored.mean_parascore, 0.851064, 1e-6);
}

TEST(ScoreSet, MeanAndPermutation) {
  HashProvider provider;
  const Utterance utt{"u1", "v", 0, "The dog ran across the park.", {}};
  std::vector<std::string> variants = {"A dog sprinted through the park.", "The puppy dashed across the green.",
                                       "Across the park the dog was running.", "The hound raced over the park.",
                                       "The dog ran across the park."};
  const auto scored = score_set(utt, complete_set(variants), {}, provider);
  double sum = 0.0;
  for (const auto& s : *scored.scores) sum += s.parascore;
  EXPECT_NEAR(*scored.mean_parascore, sum / 5.0, 1e-12);

  std::reverse(variants.begin(), variants.end());
  const auto reversed = score_set(utt, complete_set(variants), {}, provider);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ((*reversed.scores)[i], (*scored.scores)[4 - i]);
}

TEST(ScoreSet, ErrorsNameTheVariant) {
  const Utterance utt{"u1", "v", 0, "The dog ran across the park.", {}};
  FailingProvider provider("bad variant here ok");
  ParaphraseSet missing;
  EXPECT_THROW(score_set(utt, missing, {}, provider), DataError);
  try {
    score_set(utt, complete_set({"fine variant here ok", "bad variant here ok"}), {}, provider);
    FAIL();
  } catch (const TextRejected& e) {
    EXPECT_NE(std::string(e.what()).find("variant 1"), std::string::npos) << e.what();
  }
}

TEST(FilterThreshold, InclusiveAndStable) {
  ParaphraseSet set = complete_set({"v0", "v1", "v2", "v3", "v4"});
  std::vector<VariantScore> scores;
  for (double p : {0.71, 0.70, 0.69, 0.8, 0.2}) scores.push_back({p, 0.0, 0.0});
  set.scores = scores;
  std::vector<std::size_t> idx;
  for (const auto& [i, v] : filter_threshold(set, 0.7)) idx.push_back(i);
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(filter_threshold(set, 0.0).size(), 5u);
  EXPECT_TRUE(filter_threshold(set, 1.01).empty());
  set.scores.reset();
  EXPECT_THROW(filter_threshold(set, 0.7), DataError);
}

TEST(Summarize, Examples) {
  const auto a = summarize({0.5, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(a.mean, 0.5);
  EXPECT_DOUBLE_EQ(a.std, 0.0);
  ASSERT_EQ(a.histogram.size(), 1u);
  EXPECT_EQ(a.histogram[0].count, 3u);

  const auto b = summarize({0.0, 1.0}, 0.5);
  ASSERT_EQ(b.histogram.size(), 2u);
  EXPECT_DOUBLE_EQ(b.histogram[0].start, 0.0);
  EXPECT_DOUBLE_EQ(b.histogram[1].end, 1.0);
  EXPECT_EQ(b.histogram[0].count, 1u);
  EXPECT_EQ(b.histogram[1].count, 1u);
  EXPECT_DOUBLE_EQ(b.mean, 0.5);
  EXPECT_DOUBLE_EQ(b.std, 0.5);

  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(i / 999.0);
  const auto c = summarize(grid);
  EXPECT_NEAR(c.percentiles.at(0.5), 0.5, 0.02);
  EXPECT_LE(c.percentiles.at(0.25), c.percentiles.at(0.5));
  EXPECT_LE(c.percentiles.at(0.5), c.percentiles.at(0.75));
  std::size_t total = 0;
  for (const auto& bin : c.histogram) total += bin.count;
  EXPECT_EQ(total, 1000u);

  EXPECT_THROW(summarize({}), DataError);
}

TEST(Summarize, PercentilesInterpolateLinearly) {
  const auto s = summarize({4.0, 1.0, 3.0, 2.0}, 1.0);
  EXPECT_DOUBLE_EQ(s.percentiles.at(0.25), 1.75);
  EXPECT_DOUBLE_EQ(s.percentiles.at(0.5), 2.5);
  EXPECT_DOUBLE_EQ(s.percentiles.at(0.75), 3.25);
}

TEST(Summarize, CsvExport) {
  TempDir dir;
  write_distribution_csv(summarize({0.0, 1.0}, 0.5), dir / "h.csv", dir / "s.csv");
  EXPECT_EQ(testing::slurp(dir / "h.csv"), "bin_start,bin_end,count\n0,0.5,1\n0.5,1,1\n");
  EXPECT_EQ(testing::slurp(dir / "s.csv"), "mean,std,p25,p50,p75,count\n0.5,0.5,0.25,0.5,0.75,2\n");
}

}  // namespace
}  // namespace paraeval
