#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "paraeval/analysis.hpp"
#include "paraeval/bleu_para.hpp"
#include "paraeval/dataset_io.hpp"
#include "paraeval/parascore.hpp"
#include "paraeval/paragen.hpp"

namespace paraeval::cli {

struct GlobalSection {
  std::optional<std::uint64_t> seed;
  std::string log_level = "info";
};

struct IoSection {
  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::jsonl;
};

struct GenerateSection {
  GenerationConfig generation;
  std::filesystem::path output;
  /// Defaults to the output path with extension ".failures.jsonl".
  std::filesystem::path failure_log;
  std::string api_key;
  /// Environment variable consulted for the API key.
  std::string api_key_env = "PARAEVAL_API_KEY";
  std::size_t transport_retries = 3;
};

enum class ProviderKind { file, service };

struct ProviderSection {
  ProviderKind kind = ProviderKind::file;
  std::filesystem::path store;
  std::string url;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;
  std::string model;
  std::size_t cache_size = 10000;
};

struct ScoreSection {
  std::filesystem::path input;
  std::filesystem::path output;
  /// Per-(generator, strategy) distribution CSVs; skipped when empty.
  std::filesystem::path summary_dir;
  double bin_width = kDefaultBinWidth;
  /// 0 means hardware concurrency.
  std::size_t threads = 0;
};

struct EvalSection {
  std::filesystem::path instances;
  ParaMode mode = ParaMode::select_best;
  /// One JSON report per line: without and with paraphrases.
  std::filesystem::path output;
  /// Defaults to the output path with extension ".selections.jsonl".
  std::filesystem::path selections;
  /// Defaults to the output path with extension ".scores.jsonl".
  std::filesystem::path instance_scores;
};

struct CorrelateSection {
  std::filesystem::path ratings;
  /// Per-instance scores written by eval.
  std::filesystem::path scores;
  std::vector<std::string> metrics = {"bleu", "bleu_para"};
  double extremes_low = kExtremesLow;
  double extremes_high = kExtremesHigh;
  std::filesystem::path output;
};

struct TrainsetSection {
  std::filesystem::path input;
  /// Falls back to parascore.threshold.
  std::optional<double> threshold;
  std::filesystem::path output;
};

struct RunConfig {
  GlobalSection global;
  IoSection io;
  GenerateSection generate;
  ParaScoreConfig parascore;
  ProviderSection provider;
  ScoreSection score;
  EvalSection eval;
  CorrelateSection correlate;
  TrainsetSection trainset;
};

/// Parses an INI/TOML-style file with sections global, io, generation,
/// parascore, provider, score, eval, correlate and trainset. Unknown sections
/// or keys throw ConfigError. Relative paths resolve against `base_dir`.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

/// Reads `path` and resolves relative paths against its directory.
RunConfig load_config(const std::filesystem::path& path);

/// Applies PARAEVAL_ENDPOINT and the configured API-key variable.
void apply_environment(RunConfig& config);

}  // namespace paraeval::cli
