#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paraeval/chat_client.hpp"
#include "paraeval/dataset_io.hpp"

namespace paraeval {

struct GenerationConfig {
  std::size_t k = 5;
  double temperature = 0.7;
  double top_p = 0.95;
  /// sequential or iterative; context use is governed by context_size.
  GenerationStrategy strategy = GenerationStrategy::sequential;
  /// Number of preceding same-video sentences shown as context.
  std::size_t context_size = 0;
  std::string model;
  std::string endpoint;
  /// Fresh samples requested after a wrong-shape response.
  std::size_t max_retries = 0;
  std::chrono::milliseconds request_timeout{60000};
  std::size_t max_in_flight = 4;
  /// run_generation stops after this many transport failures in a row.
  std::size_t max_consecutive_failures = 5;
  std::optional<std::uint64_t> seed;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  /// Strategy recorded on generated sets, e.g. iterative_context.
  GenerationStrategy recorded_strategy() const noexcept;
};

struct PromptEnvelope {
  std::string system_text;
  std::string user_text;
};

/// Sequential prompts ask for cfg.k paraphrases; iterative prompts ask for
/// one and list `priors` as outputs not to repeat. Non-empty `context` adds a
/// "Context:" line followed by one sentence per line, just before "Sentence:".
PromptEnvelope build_prompt(std::string_view sentence, const GenerationConfig& cfg,
                            std::span<const std::string> context = {}, std::span<const std::string> priors = {});

/// Texts of up to `m` utterances immediately preceding `target` in the same
/// video, oldest first. Throws DataError if `target` is not in `corpus`.
std::vector<std::string> context_window(std::span<const Utterance> corpus, const Utterance& target, std::size_t m);

/// One paraphrase set for `utt`. A response that does not normalize to the
/// expected number of lines is resampled up to cfg.max_retries times, after
/// which the set is returned with status missing. TransportError from the
/// client propagates. `attempts`, when given, receives the number of chat
/// calls made.
ParaphraseSet generate_set(const Utterance& utt, const GenerationConfig& cfg, ChatClient& client,
                           std::span<const std::string> context = {}, std::size_t* attempts = nullptr);

struct GenerationRunStats {
  std::size_t already_done = 0;
  std::size_t complete = 0;
  std::size_t missing = 0;
  std::size_t failed = 0;
  /// True when the run stopped early on consecutive transport failures.
  bool aborted = false;
};

/// Generates sets for every utterance whose id is not yet in `output_path`,
/// appending each finished set as one line. Transport failures are appended
/// to `failure_log_path` as {"utterance_id", "error", "attempts"}.
GenerationRunStats run_generation(std::span<const Utterance> corpus, const GenerationConfig& cfg, ChatClient& client,
                                  const std::filesystem::path& output_path,
                                  const std::filesystem::path& failure_log_path);

}  // namespace paraeval
