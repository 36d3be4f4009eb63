#include "paraeval/cli/commands.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "paraeval/analysis.hpp"
#include "paraeval/errors.hpp"
#include "paraeval/parallel.hpp"

namespace paraeval::cli {
namespace fs = std::filesystem;

namespace {

void require_input(const fs::path& path, std::string_view key) {
  if (path.empty()) throw ConfigError(std::string(key) + " is not set");
  if (!fs::is_regular_file(path)) throw IoError(std::string(key) + ": no such file " + path.string());
}

fs::path require_output(const std::optional<fs::path>& override_path, const fs::path& configured,
                        std::string_view key) {
  const fs::path path = override_path.value_or(configured);
  if (path.empty()) throw ConfigError(std::string(key) + " is not set (or pass --out)");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  return path;
}

fs::path sibling(const fs::path& path, std::string_view extension) {
  fs::path out = path;
  out.replace_extension(extension);
  return out;
}

template <typename T>
void apply_limit(std::vector<T>& items, const CommonOptions& opts) {
  if (opts.limit && items.size() > *opts.limit) items.resize(*opts.limit);
}

template <typename T>
void write_records(const fs::path& path, std::span<const T> items) {
  std::vector<nlohmann::json> lines;
  lines.reserve(items.size());
  for (const auto& item : items) lines.push_back(to_json(item));
  write_jsonl(path, lines);
}

std::string file_stem_for(std::string_view generator, GenerationStrategy strategy) {
  std::string out;
  for (char c : generator) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
  if (out.empty()) out = "unknown";
  return out + "_" + std::string(to_string(strategy));
}

}  // namespace

int cmd_generate(const RunConfig& config, const CommonOptions& opts, ChatClient& client, std::ostream& out) {
  require_input(config.io.corpus, "io.corpus");
  const fs::path output = require_output(opts.out, config.generate.output, "generation.output");
  const fs::path failure_log =
      config.generate.failure_log.empty() ? sibling(output, ".failures.jsonl") : config.generate.failure_log;

  GenerationConfig gen = config.generate.generation;
  if (!gen.seed) gen.seed = config.global.seed;
  gen.validate();

  auto corpus = load_corpus(config.io.corpus, config.io.corpus_format);
  apply_limit(corpus, opts);
  const auto stats = run_generation(corpus, gen, client, output, failure_log);

  const std::size_t fresh = stats.complete + stats.missing;
  out << fmt::format("generate: {} new ({} complete, {} missing), {} failed, {} already done\n", fresh,
                     stats.complete, stats.missing, stats.failed, stats.already_done);
  if (stats.failed > 0) out << "failures logged to " << failure_log.string() << "\n";
  if (stats.aborted) out << "generation aborted after consecutive transport failures\n";
  return stats.failed > 0 || stats.aborted ? kUpstream : kSuccess;
}

int cmd_score(const RunConfig& config, const CommonOptions& opts, EmbeddingProvider& provider, std::ostream& out) {
  require_input(config.io.corpus, "io.corpus");
  require_input(config.score.input, "score.input");
  const fs::path output = require_output(opts.out, config.score.output, "score.output");
  if (!(config.score.bin_width > 0.0)) throw ConfigError("score.bin_width must be positive");

  const auto corpus = load_corpus(config.io.corpus, config.io.corpus_format);
  std::unordered_map<std::string, const Utterance*> by_id;
  for (const auto& utt : corpus) by_id.emplace(utt.id, &utt);
  auto sets = load_paraphrases(config.score.input);
  apply_limit(sets, opts);
  for (const auto& set : sets) {
    if (!by_id.contains(set.utterance_id)) {
      throw DataError("paraphrase set references unknown utterance " + set.utterance_id);
    }
  }

  ParaScoreConfig pcfg = config.parascore;
  pcfg.provider_identity = provider.identity();
  pcfg.validate();

  std::vector<std::string> errors(sets.size());
  parallel_for(sets.size(), config.score.threads, [&](std::size_t i) {
    if (sets[i].status != SetStatus::complete) return;
    try {
      const Utterance& utt = *by_id.at(sets[i].utterance_id);
      sets[i] = score_set(utt, std::move(sets[i]), pcfg, provider);
    } catch (const UpstreamError& e) {
      errors[i] = e.what();
    }
  });

  std::size_t scored = 0, skipped = 0, failed = 0;
  std::map<std::pair<std::string, GenerationStrategy>, std::vector<double>> groups;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!errors[i].empty()) {
      spdlog::error("scoring failed: {}", errors[i]);
      ++failed;
    } else if (sets[i].status != SetStatus::complete) {
      ++skipped;
    } else {
      ++scored;
      auto& bucket = groups[{sets[i].generator, sets[i].strategy}];
      for (const auto& s : *sets[i].scores) bucket.push_back(s.parascore);
    }
  }
  save_paraphrases(sets, output);

  out << fmt::format("score: {} scored, {} missing sets skipped, {} failed (provider {})\n", scored, skipped, failed,
                     pcfg.provider_identity);
  if (!config.score.summary_dir.empty()) fs::create_directories(config.score.summary_dir);
  for (const auto& [key, scores] : groups) {
    const auto summary = summarize(scores, config.score.bin_width);
    out << fmt::format("  {} / {}: n={} mean={:.4f} std={:.4f} p25={:.4f} p50={:.4f} p75={:.4f}\n", key.first,
                       to_string(key.second), summary.count, summary.mean, summary.std, summary.percentiles.at(0.25),
                       summary.percentiles.at(0.5), summary.percentiles.at(0.75));
    if (!config.score.summary_dir.empty()) {
      const std::string stem = file_stem_for(key.first, key.second);
      write_distribution_csv(summary, config.score.summary_dir / (stem + ".histogram.csv"),
                             config.score.summary_dir / (stem + ".summary.csv"));
    }
  }
  return failed > 0 ? kUpstream : kSuccess;
}

int cmd_eval(const RunConfig& config, const CommonOptions& opts, std::ostream& out) {
  require_input(config.eval.instances, "eval.instances");
  const fs::path output = require_output(opts.out, config.eval.output, "eval.output");
  const fs::path selections_path =
      config.eval.selections.empty() ? sibling(output, ".selections.jsonl") : config.eval.selections;
  const fs::path scores_path =
      config.eval.instance_scores.empty() ? sibling(output, ".scores.jsonl") : config.eval.instance_scores;

  auto instances = load_eval_instances(config.eval.instances);
  apply_limit(instances, opts);
  if (instances.empty()) throw DataError("no evaluation instances in " + config.eval.instances.string());

  const std::vector<EvalReport> reports = {eval_no_paraphrases(instances),
                                           bleu_para_corpus(instances, config.eval.mode)};
  write_records<EvalReport>(output, reports);

  const auto scores = instance_scores(instances);
  write_records<InstanceScores>(scores_path, scores);
  std::vector<nlohmann::json> selections;
  selections.reserve(scores.size());
  for (const auto& s : scores) {
    selections.push_back({{"instance_id", s.instance_id}, {"chosen_index", s.chosen_index},
                          {"chosen_score", s.bleu_para}});
  }
  write_jsonl(selections_path, selections);

  out << format_eval_table(reports);
  return kSuccess;
}

int cmd_correlate(const RunConfig& config, const CommonOptions& opts, std::ostream& out) {
  require_input(config.correlate.ratings, "correlate.ratings");
  require_input(config.correlate.scores, "correlate.scores");
  const fs::path output = require_output(opts.out, config.correlate.output, "correlate.output");

  using Field = double InstanceScores::*;
  static const std::map<std::string, Field, std::less<>> kFields = {{"bleu", &InstanceScores::bleu},
                                                                   {"bleu_para", &InstanceScores::bleu_para},
                                                                   {"rouge_l", &InstanceScores::rouge_l},
                                                                   {"rouge_l_para", &InstanceScores::rouge_l_para}};
  for (const auto& name : config.correlate.metrics) {
    if (!kFields.contains(name)) throw ConfigError("unknown correlation metric '" + name + "'");
  }

  auto ratings = load_ratings(config.correlate.ratings);
  apply_limit(ratings, opts);
  std::unordered_map<std::string, InstanceScores> scores;
  for (const auto& record : read_jsonl(config.correlate.scores)) {
    auto s = instance_scores_from_json(record);
    scores.insert_or_assign(s.instance_id, std::move(s));
  }

  std::vector<std::pair<std::string, double>> canonical;
  for (const auto& r : ratings) {
    if (const auto it = scores.find(r.instance_id); it != scores.end()) canonical.emplace_back(r.instance_id, it->second.bleu);
  }
  const auto extremes = extremes_subset(canonical, config.correlate.extremes_low, config.correlate.extremes_high);

  std::vector<CorrelationRow> rows;
  std::vector<nlohmann::json> records;
  for (const auto& name : config.correlate.metrics) {
    std::unordered_map<std::string, double> values;
    for (const auto& [id, s] : scores) values.emplace(id, s.*kFields.find(name)->second);
    CorrelationRow row{correlate(ratings, values, std::nullopt, name), std::nullopt};
    records.push_back(to_json(row.all));
    try {
      row.extremes = correlate(ratings, values, extremes, name);
      records.push_back(to_json(*row.extremes));
    } catch (const DataError& e) {
      spdlog::warn("extremes row for {} unavailable: {}", name, e.what());
    }
    rows.push_back(std::move(row));
  }
  write_jsonl(output, records);

  out << format_correlation_table(rows);
  out << fmt::format("{} rated items, {} in the extremes subset (<{} or >{})\n", ratings.size(), extremes.size(),
                     config.correlate.extremes_low, config.correlate.extremes_high);
  return kSuccess;
}

int cmd_build_trainset(const RunConfig& config, const CommonOptions& opts, std::ostream& out) {
  require_input(config.io.corpus, "io.corpus");
  require_input(config.trainset.input, "trainset.input");
  const fs::path output = require_output(opts.out, config.trainset.output, "trainset.output");
  const double threshold = config.trainset.threshold.value_or(config.parascore.threshold);

  auto corpus = load_corpus(config.io.corpus, config.io.corpus_format);
  apply_limit(corpus, opts);
  const auto sets = load_paraphrases(config.trainset.input);
  const auto records = build_trainset(corpus, sets, threshold);
  save_trainset(records, output);

  std::map<std::size_t, std::size_t> histogram;
  std::size_t targets = 0;
  for (const auto& r : records) {
    ++histogram[r.targets.size()];
    targets += r.targets.size();
  }
  out << fmt::format("build-trainset: {} records, {} targets (threshold {})\n", records.size(), targets, threshold);
  for (const auto& [size, n] : histogram) out << fmt::format("  {} target(s): {} records\n", size, n);
  return kSuccess;
}

namespace {

// Routes the default logger to `err` for the duration of one CLI run.
class LoggerScope {
 public:
  LoggerScope(std::ostream& err, const std::string& level) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, /*force_flush=*/true);
    auto logger = std::make_shared<spdlog::logger>("paraeval", std::move(sink));
    logger->set_pattern("[%H:%M:%S] [%l] %v");
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && level != "off") throw ConfigError("unknown log level '" + level + "'");
    logger->set_level(parsed);
    spdlog::set_default_logger(std::move(logger));
  }
  ~LoggerScope() { spdlog::set_default_logger(previous_); }
  LoggerScope(const LoggerScope&) = delete;
  LoggerScope& operator=(const LoggerScope&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

std::shared_ptr<EmbeddingProvider> make_provider(const ProviderSection& p) {
  std::shared_ptr<EmbeddingProvider> inner;
  if (p.kind == ProviderKind::file) {
    require_input(p.store, "provider.store");
    inner = std::make_shared<FileEmbeddingProvider>(FileEmbeddingProvider::load(p.store));
  } else {
    if (p.url.empty()) throw ConfigError("provider.url is not set");
    inner = std::make_shared<ServiceEmbeddingProvider>(
        ServiceProviderOptions{p.url, p.timeout, p.max_in_flight, p.model});
  }
  return std::make_shared<CachingEmbeddingProvider>(std::move(inner), p.cache_size);
}

int dispatch(const std::string& command, RunConfig& config, const CommonOptions& opts, std::ostream& out) {
  if (command == "generate") {
    const auto& g = config.generate;
    OpenAIChatClient client({g.generation.endpoint, g.api_key, g.generation.request_timeout, g.transport_retries});
    return cmd_generate(config, opts, client, out);
  }
  if (command == "score") {
    const auto provider = make_provider(config.provider);
    return cmd_score(config, opts, *provider, out);
  }
  if (command == "eval") return cmd_eval(config, opts, out);
  if (command == "correlate") return cmd_correlate(config, opts, out);
  return cmd_build_trainset(config, opts, out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Paraphrase-aware evaluation toolkit for translation corpora", "paraeval"};
  app.require_subcommand(1, 1);
  fs::path config_path;
  CommonOptions opts;
  std::optional<std::uint64_t> seed;
  std::string log_level;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"generate", "Generate paraphrase sets with a chat model"},
      {"score", "Score paraphrase sets with ParaScore"},
      {"eval", "Evaluate hypotheses with and without paraphrase references"},
      {"correlate", "Correlate per-instance metric scores with human ratings"},
      {"build-trainset", "Build training targets from scored paraphrase sets"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "Configuration file")->required();
    sub->add_option("--limit", opts.limit, "Process at most N input records");
    sub->add_option("--seed", seed, "Random seed passed to sampling");
    sub->add_option("--out", opts.out, "Primary output path");
    sub->add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig config = load_config(config_path);
    apply_environment(config);
    if (seed) config.global.seed = seed;
    if (!log_level.empty()) config.global.log_level = log_level;
    LoggerScope logging(err, config.global.log_level);
    return dispatch(command, config, opts, out);
  } catch (const ConfigError& e) {
    err << "paraeval " << command << ": configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const UpstreamError& e) {
    err << "paraeval " << command << ": upstream failure: " << e.what() << "\n";
    return kUpstream;
  } catch (const Error& e) {
    err << "paraeval " << command << ": " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "paraeval " << command << ": " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace paraeval::cli
