#include <gtest/gtest.h>

#include "paraeval/errors.hpp"
#include "paraeval/paragen.hpp"
#include "support.hpp"

namespace paraeval {
namespace {

using testing::canned_paraphrases;
using testing::MockChatClient;
using testing::numbered_responder;
using testing::prompt_sentence;
using testing::TempDir;

GenerationConfig base_config() {
  GenerationConfig cfg;
  cfg.model = "mock-model";
  return cfg;
}

std::vector<Utterance> two_video_corpus() {
  return {{"a0", "A", 0, "Video A opens here.", {}}, {"a1", "A", 1, "Video A continues now.", {}},
          {"b0", "B", 0, "Video B starts fresh.", {}}, {"b1", "B", 1, "Video B goes on.", {}},
          {"b2", "B", 2, "Video B then ends.", {}}};
}

TEST(BuildPrompt, SequentialTemplate) {
  const auto p = build_prompt("I like dogs.", base_config());
  EXPECT_EQ(p.system_text, "You are a helpful assistant.");
  EXPECT_EQ(p.user_text,
            "You are a helpful assistant that rephrases a given sentence in 5 ways, each on its own line. "
            "Try to be semantically consistent and output nothing else than these sentences. "
            "Sentence: I like dogs. Paraphrases:");
}

TEST(BuildPrompt, ContextBlockPrecedesSentence) {
  const std::vector<std::string> ctx = {"We adopted a puppy."};
  const auto p = build_prompt("I like dogs.", base_config(), ctx);
  EXPECT_NE(p.user_text.find("\nContext:\nWe adopted a puppy.\nSentence: I like dogs. Paraphrases:"), std::string::npos)
      << p.user_text;
  EXPECT_EQ(prompt_sentence(p.user_text), "I like dogs.");
}

TEST(BuildPrompt, IterativeListsPriors) {
  auto cfg = base_config();
  cfg.strategy = GenerationStrategy::iterative;
  const std::vector<std::string> priors = {"First earlier rewrite here.", "Second earlier rewrite here."};
  const auto p = build_prompt("I like dogs.", cfg, {}, priors);
  EXPECT_NE(p.user_text.find("exactly one way"), std::string::npos);
  EXPECT_NE(p.user_text.find("First earlier rewrite here.\nSecond earlier rewrite here.\n"), std::string::npos);
  EXPECT_TRUE(p.user_text.ends_with("Sentence: I like dogs. Paraphrase:"));
  EXPECT_EQ(build_prompt("I like dogs.", cfg).user_text.find("Do not repeat"), std::string::npos);
}

TEST(BuildPrompt, SentenceAppearsOnce) {
  const auto p = build_prompt("Unique marker sentence.", base_config());
  const auto first = p.user_text.find("Unique marker sentence.");
  ASSERT_NE(first, std::string::npos);
  EXPECT_EQ(p.user_text.find("Unique marker sentence.", first + 1), std::string::npos);
}

TEST(ContextWindow, ResetsAtVideoBoundary) {
  const auto corpus = two_video_corpus();
  EXPECT_TRUE(context_window(corpus, corpus[0], 3).empty());
  EXPECT_TRUE(context_window(corpus, corpus[2], 3).empty());
  EXPECT_EQ(context_window(corpus, corpus[3], 3), (std::vector<std::string>{"Video B starts fresh."}));
  EXPECT_EQ(context_window(corpus, corpus[4], 1), (std::vector<std::string>{"Video B goes on."}));
  EXPECT_TRUE(context_window(corpus, corpus[4], 0).empty());
  EXPECT_THROW(context_window(corpus, Utterance{"zz", "A", 9, "x", {}}, 1), DataError);
}

TEST(ContextWindow, TakesImmediatePredecessors) {
  std::vector<Utterance> corpus;
  for (std::size_t i = 0; i < 6; ++i) corpus.push_back({"v" + std::to_string(i), "V", i, "s" + std::to_string(i), {}});
  EXPECT_EQ(context_window(corpus, corpus[5], 2), (std::vector<std::string>{"s3", "s4"}));
}

TEST(GenerateSet, SequentialCleanReply) {
  MockChatClient client(numbered_responder(5));
  const Utterance utt{"u", "v", 0, "The weather is nice today.", {}};
  std::size_t attempts = 0;
  const auto set = generate_set(utt, base_config(), client, {}, &attempts);
  EXPECT_EQ(set.status, SetStatus::complete);
  EXPECT_EQ(set.variants, canned_paraphrases(utt.text, 5));
  EXPECT_EQ(set.generator, "mock-model");
  EXPECT_EQ(set.strategy, GenerationStrategy::sequential);
  EXPECT_EQ(attempts, 1u);
}

TEST(GenerateSet, WrongShapeBecomesMissingAfterRetries) {
  MockChatClient client(numbered_responder(4));
  auto cfg = base_config();
  cfg.max_retries = 1;
  cfg.seed = 10;
  std::size_t attempts = 0;
  const auto set = generate_set({"u", "v", 0, "The weather is nice today.", {}}, cfg, client, {}, &attempts);
  EXPECT_EQ(set.status, SetStatus::missing);
  EXPECT_TRUE(set.variants.empty());
  EXPECT_EQ(attempts, 2u);
  const auto reqs = client.requests();
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0].seed, 10u);
  EXPECT_EQ(reqs[1].seed, 11u);
}

TEST(GenerateSet, IterativeSameReplyPassesThrough) {
  MockChatClient client([](const ChatRequest&, std::size_t) { return "The same reworded sentence here."; });
  auto cfg = base_config();
  cfg.strategy = GenerationStrategy::iterative;
  const auto set = generate_set({"u", "v", 0, "Some original sentence.", {}}, cfg, client);
  EXPECT_EQ(set.status, SetStatus::complete);
  EXPECT_EQ(set.variants, std::vector<std::string>(5, "The same reworded sentence here."));
  const auto reqs = client.requests();
  ASSERT_EQ(reqs.size(), 5u);
  EXPECT_EQ(reqs[0].user.find("Do not repeat"), std::string::npos);
  EXPECT_NE(reqs[2].user.find("Do not repeat"), std::string::npos);
}

TEST(GenerateSet, ReproducibleWithDeterministicClient) {
  MockChatClient a(numbered_responder(5)), b(numbered_responder(5));
  const Utterance utt{"u", "v", 0, "The weather is nice today.", {}};
  EXPECT_EQ(generate_set(utt, base_config(), a), generate_set(utt, base_config(), b));
}

TEST(GenerateSet, TransportErrorPropagates) {
  MockChatClient client([](const ChatRequest&, std::size_t) -> std::string { throw TransportError("down"); });
  EXPECT_THROW(generate_set({"u", "v", 0, "x y z w", {}}, base_config(), client), TransportError);
}

std::vector<Utterance> ten_utterances() {
  std::vector<Utterance> corpus;
  for (std::size_t i = 0; i < 10; ++i) {
    corpus.push_back({"u" + std::to_string(i), i < 5 ? "A" : "B", i % 5, "Sentence number " + std::to_string(i) + " here.", {}});
  }
  return corpus;
}

TEST(RunGeneration, PersistsAllAndResumes) {
  TempDir dir;
  const auto corpus = ten_utterances();
  auto cfg = base_config();
  cfg.context_size = 1;
  MockChatClient client(numbered_responder(5));
  const auto stats = run_generation(corpus, cfg, client, dir / "p.jsonl", dir / "f.jsonl");
  EXPECT_EQ(stats.complete, 10u);
  EXPECT_EQ(client.calls(), 10u);
  const auto sets = load_paraphrases(dir / "p.jsonl");
  ASSERT_EQ(sets.size(), 10u);
  for (const auto& s : sets) EXPECT_EQ(s.strategy, GenerationStrategy::sequential_context);
  for (const auto& req : client.requests()) {
    const auto sentence = prompt_sentence(req.user);
    const bool first_in_video = sentence == "Sentence number 0 here." || sentence == "Sentence number 5 here.";
    EXPECT_EQ(req.user.find("Context:") == std::string::npos, first_in_video) << req.user;
  }

  MockChatClient again(numbered_responder(5));
  const auto rerun = run_generation(corpus, cfg, again, dir / "p.jsonl", dir / "f.jsonl");
  EXPECT_EQ(again.calls(), 0u);
  EXPECT_EQ(rerun.already_done, 10u);
  EXPECT_FALSE(std::filesystem::exists(dir / "f.jsonl"));
}

TEST(RunGeneration, PermanentFailureGoesToSidecar) {
  TempDir dir;
  const auto corpus = ten_utterances();
  MockChatClient client([](const ChatRequest& req, std::size_t call) {
    if (prompt_sentence(req.user) == "Sentence number 3 here.") throw TransportError("HTTP 500");
    return numbered_responder(5)(req, call);
  });
  const auto stats = run_generation(corpus, base_config(), client, dir / "p.jsonl", dir / "f.jsonl");
  EXPECT_EQ(stats.complete, 9u);
  EXPECT_EQ(stats.failed, 1u);
  EXPECT_FALSE(stats.aborted);
  const auto failures = testing::slurp(dir / "f.jsonl");
  const auto record = nlohmann::json::parse(failures);
  EXPECT_EQ(record.at("utterance_id"), "u3");
  EXPECT_EQ(record.at("attempts"), 1);
  EXPECT_EQ(load_paraphrases(dir / "p.jsonl").size(), 9u);
}

TEST(RunGeneration, AbortsAfterConsecutiveFailures) {
  TempDir dir;
  auto cfg = base_config();
  cfg.max_in_flight = 1;
  cfg.max_consecutive_failures = 3;
  MockChatClient client([](const ChatRequest&, std::size_t) -> std::string { throw TransportError("down"); });
  const auto stats = run_generation(ten_utterances(), cfg, client, dir / "p.jsonl", dir / "f.jsonl");
  EXPECT_TRUE(stats.aborted);
  EXPECT_EQ(stats.failed, 3u);
  EXPECT_EQ(client.calls(), 3u);
}

TEST(GenerationConfig, Validation) {
  GenerationConfig cfg;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.model = "m";
  EXPECT_NO_THROW(cfg.validate());
  cfg.strategy = GenerationStrategy::iterative_context;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace paraeval
