#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

// Data model and on-disk formats. Every persisted type is one JSON object per
// line; unknown fields of input records are carried in `extra` and written
// back unchanged.
namespace paraeval {

/// One canonical reference sentence, located within its source video.
struct Utterance {
  std::string id;
  std::string video_id;
  std::size_t index_in_video = 0;
  std::string text;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Utterance&) const = default;
};

enum class CorpusFormat { jsonl, tsv };

enum class GenerationStrategy { sequential, iterative, sequential_context, iterative_context };

enum class SetStatus { complete, missing };

struct VariantScore {
  double parascore = 0.0;
  double bertscore_f1 = 0.0;
  double nld = 0.0;

  bool operator==(const VariantScore&) const = default;
};

struct ParaphraseSet {
  std::string utterance_id;
  std::vector<std::string> variants;
  std::string generator;
  GenerationStrategy strategy = GenerationStrategy::sequential;
  std::optional<std::vector<VariantScore>> scores;
  SetStatus status = SetStatus::missing;
  nlohmann::json extra = nlohmann::json::object();
  /// Mean parascore over variants; filled by scoring, never persisted.
  std::optional<double> mean_parascore;

  bool is_scored() const noexcept { return scores.has_value(); }

  /// Field-for-field equality of the persisted fields.
  bool operator==(const ParaphraseSet& other) const;
};

struct EvalInstance {
  std::string id;
  std::string hypothesis;
  std::string canonical_reference;
  std::vector<std::string> paraphrase_references;
  nlohmann::json extra = nlohmann::json::object();

  /// Canonical reference first, then paraphrases in stored order.
  std::vector<std::string> references() const;

  bool operator==(const EvalInstance&) const = default;
};

struct HumanRating {
  std::string instance_id;
  double mean_rating = 0.0;
  int n_annotators = 1;

  bool operator==(const HumanRating&) const = default;
};

/// Training targets for one utterance; the canonical reference is always first.
struct TrainRecord {
  std::string utterance_id;
  std::vector<std::string> targets;

  bool operator==(const TrainRecord&) const = default;
};

std::string_view to_string(GenerationStrategy strategy) noexcept;
std::string_view to_string(SetStatus status) noexcept;
GenerationStrategy parse_strategy(std::string_view name);
SetStatus parse_status(std::string_view name);
CorpusFormat parse_corpus_format(std::string_view name);

// JSON mapping for individual records. The *_from_json functions throw
// DataError naming the offending field.
nlohmann::json to_json(const Utterance& utterance);
nlohmann::json to_json(const ParaphraseSet& set);
nlohmann::json to_json(const EvalInstance& instance);
nlohmann::json to_json(const HumanRating& rating);
nlohmann::json to_json(const TrainRecord& record);
Utterance utterance_from_json(const nlohmann::json& record);
ParaphraseSet paraphrase_set_from_json(const nlohmann::json& record);
EvalInstance eval_instance_from_json(const nlohmann::json& record);
HumanRating human_rating_from_json(const nlohmann::json& record);
TrainRecord train_record_from_json(const nlohmann::json& record);

/// Reads a JSONL file, skipping blank lines. Parse failures carry the 1-based
/// line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// Writes one compact JSON object per line, replacing the file.
void write_jsonl(const std::filesystem::path& path, std::span<const nlohmann::json> records);

/// Loads a corpus sorted by (video_id, index_in_video). Duplicate ids and
/// duplicate (video, index) positions are rejected; indices inside a video
/// are renumbered to 0..n-1 if the file has gaps.
std::vector<Utterance> load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(std::span<const Utterance> corpus, const std::filesystem::path& path);

std::vector<ParaphraseSet> load_paraphrases(const std::filesystem::path& path);
void save_paraphrases(std::span<const ParaphraseSet> sets, const std::filesystem::path& path);

std::vector<EvalInstance> load_eval_instances(const std::filesystem::path& path);
void save_eval_instances(std::span<const EvalInstance> instances, const std::filesystem::path& path);

std::vector<HumanRating> load_ratings(const std::filesystem::path& path);
void save_ratings(std::span<const HumanRating> ratings, const std::filesystem::path& path);

std::vector<TrainRecord> load_trainset(const std::filesystem::path& path);
void save_trainset(std::span<const TrainRecord> records, const std::filesystem::path& path);

/// One record per corpus utterance: the canonical text followed by every
/// variant with parascore >= threshold, in variant order. Utterances without
/// a complete set get a single target. Throws DataError if a complete set is
/// unscored while threshold > 0.
std::vector<TrainRecord> build_trainset(std::span<const Utterance> corpus,
                                        std::span<const ParaphraseSet> sets,
                                        double threshold);

}  // namespace paraeval
