#include "paraeval/paragen.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "paraeval/errors.hpp"
#include "paraeval/parallel.hpp"
#include "paraeval/textnorm.hpp"

namespace paraeval {

void GenerationConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(temperature >= 0.0)) throw ConfigError(fmt::format("temperature must be >= 0, got {}", temperature));
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError(fmt::format("top_p must be in (0, 1], got {}", top_p));
  if (strategy != GenerationStrategy::sequential && strategy != GenerationStrategy::iterative) {
    throw ConfigError("strategy must be sequential or iterative; use context_size for context");
  }
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (max_consecutive_failures < 1) throw ConfigError("max_consecutive_failures must be at least 1");
  if (model.empty()) throw ConfigError("generation model is not configured");
}

GenerationStrategy GenerationConfig::recorded_strategy() const noexcept {
  const bool iterative = strategy == GenerationStrategy::iterative || strategy == GenerationStrategy::iterative_context;
  if (context_size == 0) return iterative ? GenerationStrategy::iterative : GenerationStrategy::sequential;
  return iterative ? GenerationStrategy::iterative_context : GenerationStrategy::sequential_context;
}

namespace {

constexpr std::string_view kSystemText = "You are a helpful assistant.";

bool is_iterative(const GenerationConfig& cfg) {
  return cfg.strategy == GenerationStrategy::iterative || cfg.strategy == GenerationStrategy::iterative_context;
}

std::string context_block(std::span<const std::string> context) {
  if (context.empty()) return {};
  std::string block = "Context:\n";
  for (const auto& sentence : context) block += sentence + "\n";
  return block;
}

}  // namespace

PromptEnvelope build_prompt(std::string_view sentence, const GenerationConfig& cfg,
                            std::span<const std::string> context, std::span<const std::string> priors) {
  PromptEnvelope prompt;
  prompt.system_text = kSystemText;
  const std::string ctx = context_block(context);
  if (!is_iterative(cfg)) {
    prompt.user_text = fmt::format(
        "You are a helpful assistant that rephrases a given sentence in {} ways, each on its own line. "
        "Try to be semantically consistent and output nothing else than these sentences.{}Sentence: {} Paraphrases:",
        cfg.k, ctx.empty() ? " " : "\n" + ctx, sentence);
    return prompt;
  }
  std::string avoid;
  if (!priors.empty()) {
    avoid = "Do not repeat any of these earlier paraphrases:\n";
    for (const auto& p : priors) avoid += p + "\n";
  }
  const std::string blocks = avoid + ctx;
  prompt.user_text = fmt::format(
      "You are a helpful assistant that rephrases a given sentence in exactly one way, on a single line. "
      "Try to be semantically consistent and output nothing else than this sentence.{}Sentence: {} Paraphrase:",
      blocks.empty() ? " " : "\n" + blocks, sentence);
  return prompt;
}

std::vector<std::string> context_window(std::span<const Utterance> corpus, const Utterance& target, std::size_t m) {
  const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const Utterance& u) { return u.id == target.id; });
  if (it == corpus.end()) throw DataError("utterance " + target.id + " is not in the corpus");
  std::vector<std::string> out;
  for (auto prev = it; prev != corpus.begin() && out.size() < m;) {
    --prev;
    if (prev->video_id != it->video_id) break;
    out.push_back(prev->text);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

ChatRequest make_request(const PromptEnvelope& prompt, const GenerationConfig& cfg, std::size_t attempt) {
  ChatRequest req;
  req.model = cfg.model;
  req.system = prompt.system_text;
  req.user = prompt.user_text;
  req.temperature = cfg.temperature;
  req.top_p = cfg.top_p;
  // Each resample gets its own seed so a retry can differ from the rejected output.
  if (cfg.seed) req.seed = *cfg.seed + attempt;
  return req;
}

// Calls the model until the output normalizes to `lines` lines or retries run out.
std::optional<std::vector<std::string>> sample(const PromptEnvelope& prompt, std::size_t lines,
                                               const GenerationConfig& cfg, ChatClient& client,
                                               std::size_t& attempts) {
  for (std::size_t retry = 0; retry <= cfg.max_retries; ++retry) {
    const std::string raw = client.complete(make_request(prompt, cfg, attempts));
    ++attempts;
    if (auto normalized = normalize_generation(raw, lines)) return normalized;
  }
  return std::nullopt;
}

}  // namespace

ParaphraseSet generate_set(const Utterance& utt, const GenerationConfig& cfg, ChatClient& client,
                           std::span<const std::string> context, std::size_t* attempts) {
  ParaphraseSet set;
  set.utterance_id = utt.id;
  set.generator = cfg.model;
  set.strategy = cfg.recorded_strategy();
  set.status = SetStatus::missing;

  std::size_t calls = 0;
  struct Report {
    std::size_t& calls;
    std::size_t* out;
    ~Report() {
      if (out) *out = calls;
    }
  } report{calls, attempts};

  if (!is_iterative(cfg)) {
    auto lines = sample(build_prompt(utt.text, cfg, context), cfg.k, cfg, client, calls);
    if (lines) {
      set.variants = std::move(*lines);
      set.status = SetStatus::complete;
    }
    return set;
  }

  std::vector<std::string> variants;
  while (variants.size() < cfg.k) {
    auto line = sample(build_prompt(utt.text, cfg, context, variants), 1, cfg, client, calls);
    if (!line) return set;
    variants.push_back(std::move(line->front()));
  }
  set.variants = std::move(variants);
  set.status = SetStatus::complete;
  return set;
}

GenerationRunStats run_generation(std::span<const Utterance> corpus, const GenerationConfig& cfg, ChatClient& client,
                                  const std::filesystem::path& output_path,
                                  const std::filesystem::path& failure_log_path) {
  cfg.validate();
  GenerationRunStats stats;

  std::unordered_set<std::string> done;
  if (std::filesystem::exists(output_path)) {
    for (const auto& set : load_paraphrases(output_path)) done.insert(set.utterance_id);
  }
  std::vector<const Utterance*> pending;
  for (const auto& utt : corpus) {
    if (done.contains(utt.id)) {
      ++stats.already_done;
    } else {
      pending.push_back(&utt);
    }
  }
  spdlog::info("generation: {} utterances, {} already done, {} to generate", corpus.size(), stats.already_done,
               pending.size());
  if (pending.empty()) return stats;

  std::ofstream out(output_path, std::ios::app);
  if (!out) throw IoError("cannot append to " + output_path.string());
  std::ofstream failures;

  std::mutex mutex;
  std::size_t consecutive_failures = 0;
  std::atomic<bool> abort{false};

  parallel_for(pending.size(), cfg.max_in_flight, [&](std::size_t i) {
    if (abort) return;
    const Utterance& utt = *pending[i];
    const auto context = context_window(corpus, utt, cfg.context_size);
    std::size_t attempts = 0;
    try {
      const ParaphraseSet set = generate_set(utt, cfg, client, context, &attempts);
      std::lock_guard lock(mutex);
      out << to_json(set).dump() << '\n';
      out.flush();
      if (!out) throw IoError("failed writing " + output_path.string());
      consecutive_failures = 0;
      ++(set.status == SetStatus::complete ? stats.complete : stats.missing);
    } catch (const TransportError& e) {
      spdlog::warn("generation failed for {}: {}", utt.id, e.what());
      std::lock_guard lock(mutex);
      if (!failures.is_open()) {
        failures.open(failure_log_path, std::ios::app);
        if (!failures) throw IoError("cannot append to " + failure_log_path.string());
      }
      const nlohmann::json record = {{"utterance_id", utt.id}, {"error", e.what()}, {"attempts", attempts + 1}};
      failures << record.dump() << '\n';
      failures.flush();
      ++stats.failed;
      if (++consecutive_failures >= cfg.max_consecutive_failures && !abort) {
        spdlog::error("aborting generation after {} consecutive transport failures", consecutive_failures);
        abort = true;
      }
    }
  });
  stats.aborted = abort;
  return stats;
}

}  // namespace paraeval
