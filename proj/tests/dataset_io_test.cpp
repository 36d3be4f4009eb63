#include <gtest/gtest.h>

#include "paraeval/dataset_io.hpp"
#include "paraeval/errors.hpp"
#include "support.hpp"

namespace paraeval {
namespace {

using testing::TempDir;
using testing::write_file;

ParaphraseSet scored_set(const std::string& id, std::vector<double> scores) {
  ParaphraseSet set;
  set.utterance_id = id;
  set.generator = "model-a";
  set.status = SetStatus::complete;
  std::vector<VariantScore> vs;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    set.variants.push_back(id + " variant number " + std::to_string(i));
    vs.push_back({scores[i], 0.9, 0.2});
  }
  set.scores = vs;
  return set;
}

TEST(Corpus, JsonlLoadSortsByVideoAndIndex) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             R"({"id":"b1","video_id":"B","index":1,"text":"Second of B."}
{"id":"a0","video_id":"A","index":0,"text":"First of A.","speaker":"x"}

{"id":"b0","video_id":"B","index":0,"text":"First of B."}
)");
  const auto corpus = load_corpus(dir / "c.jsonl", CorpusFormat::jsonl);
  ASSERT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus[0].id, "a0");
  EXPECT_EQ(corpus[1].id, "b0");
  EXPECT_EQ(corpus[2].id, "b1");
  EXPECT_EQ(corpus[0].extra.at("speaker"), "x");
}

TEST(Corpus, TsvWithHeaderAndGapRenumbering) {
  TempDir dir;
  write_file(dir / "c.tsv", "id\tvideo_id\tindex\ttext\nu1\tv\t0\tHello there.\nu2\tv\t5\tGeneral Kenobi.\n");
  const auto corpus = load_corpus(dir / "c.tsv", CorpusFormat::tsv);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[1].index_in_video, 1u);
}

TEST(Corpus, RejectsDuplicatesAndReportsLines) {
  TempDir dir;
  write_file(dir / "dup.jsonl", R"({"id":"a","video_id":"v","index":0,"text":"x y"}
{"id":"a","video_id":"v","index":1,"text":"x y"}
)");
  EXPECT_THROW(load_corpus(dir / "dup.jsonl", CorpusFormat::jsonl), DataError);

  write_file(dir / "pos.jsonl", R"({"id":"a","video_id":"v","index":0,"text":"x y"}
{"id":"b","video_id":"v","index":0,"text":"x y"}
)");
  EXPECT_THROW(load_corpus(dir / "pos.jsonl", CorpusFormat::jsonl), DataError);

  write_file(dir / "bad.jsonl", "{\"id\":\"a\",\"video_id\":\"v\",\"index\":0,\"text\":\"ok\"}\n{not json}\n");
  try {
    load_corpus(dir / "bad.jsonl", CorpusFormat::jsonl);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_corpus(dir / "absent.jsonl", CorpusFormat::jsonl), IoError);
}

TEST(ParaphraseSets, RoundTripIsLossless) {
  TempDir dir;
  ParaphraseSet a = scored_set("u1", {0.123456789012345, 0.7, 1.0 / 3.0});
  a.strategy = GenerationStrategy::iterative_context;
  a.extra = {{"note", "kept"}};
  ParaphraseSet b;
  b.utterance_id = "u2";
  b.generator = "model-b";
  b.status = SetStatus::missing;
  const std::vector<ParaphraseSet> sets = {a, b};
  save_paraphrases(sets, dir / "p.jsonl");
  EXPECT_EQ(load_paraphrases(dir / "p.jsonl"), sets);
}

TEST(ParaphraseSets, ValidatesShape) {
  EXPECT_THROW(paraphrase_set_from_json(nlohmann::json::parse(
                   R"({"utterance_id":"u","generator":"g","strategy":"sequential","status":"complete",
                       "variants":["a b c d"],"scores":[]})")),
               DataError);
  EXPECT_THROW(paraphrase_set_from_json(nlohmann::json::parse(
                   R"({"utterance_id":"u","generator":"g","strategy":"sequential","status":"missing",
                       "variants":["a b c d"]})")),
               DataError);
  EXPECT_THROW(paraphrase_set_from_json(nlohmann::json::parse(
                   R"({"utterance_id":"u","generator":"g","strategy":"zigzag","status":"missing","variants":[]})")),
               DataError);
}

TEST(OtherRecords, RoundTrip) {
  TempDir dir;
  const std::vector<EvalInstance> instances = {{"i1", "hyp one", "ref one", {"para one", "para two"}},
                                               {"i2", "hyp two", "ref two", {}}};
  save_eval_instances(instances, dir / "e.jsonl");
  EXPECT_EQ(load_eval_instances(dir / "e.jsonl"), instances);
  EXPECT_EQ(instances[0].references(), (std::vector<std::string>{"ref one", "para one", "para two"}));

  const std::vector<HumanRating> ratings = {{"i1", 3.5, 6}, {"i2", 0.0, 1}};
  save_ratings(ratings, dir / "r.jsonl");
  EXPECT_EQ(load_ratings(dir / "r.jsonl"), ratings);

  const std::vector<TrainRecord> records = {{"u1", {"a", "b"}}};
  save_trainset(records, dir / "t.jsonl");
  EXPECT_EQ(load_trainset(dir / "t.jsonl"), records);
}

TEST(OtherRecords, RatingBounds) {
  EXPECT_THROW(human_rating_from_json({{"instance_id", "x"}, {"mean_rating", 5.5}, {"n_annotators", 3}}), DataError);
  EXPECT_THROW(human_rating_from_json({{"instance_id", "x"}, {"mean_rating", 2.0}, {"n_annotators", 0}}), DataError);
}

TEST(BuildTrainset, KeepsCanonicalThenVariantsAtOrAboveThreshold) {
  const std::vector<Utterance> corpus = {{"u1", "v", 0, "Canonical one.", {}}, {"u2", "v", 1, "Canonical two.", {}},
                                         {"u3", "v", 2, "Canonical three.", {}}};
  ParaphraseSet missing;
  missing.utterance_id = "u2";
  missing.status = SetStatus::missing;
  const std::vector<ParaphraseSet> sets = {scored_set("u1", {0.71, 0.70, 0.69, 0.8, 0.2}), missing};

  const auto records = build_trainset(corpus, sets, 0.7);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].targets,
            (std::vector<std::string>{"Canonical one.", "u1 variant number 0", "u1 variant number 1",
                                      "u1 variant number 3"}));
  EXPECT_EQ(records[1].targets.size(), 1u);
  EXPECT_EQ(records[2].targets.size(), 1u);

  EXPECT_EQ(build_trainset(corpus, sets, 0.0)[0].targets.size(), 6u);
}

TEST(BuildTrainset, UnscoredSetNeedsZeroThreshold) {
  const std::vector<Utterance> corpus = {{"u1", "v", 0, "Canonical one.", {}}};
  ParaphraseSet set = scored_set("u1", {0.9});
  set.scores.reset();
  const std::vector<ParaphraseSet> sets = {set};
  EXPECT_THROW(build_trainset(corpus, sets, 0.7), DataError);
  EXPECT_EQ(build_trainset(corpus, sets, 0.0)[0].targets.size(), 2u);
}

}  // namespace
}  // namespace paraeval
