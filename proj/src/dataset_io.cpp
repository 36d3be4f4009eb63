#include "paraeval/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "paraeval/errors.hpp"
#include "paraeval/unicode.hpp"

namespace paraeval {

using nlohmann::json;

namespace {

const json& require(const json& record, std::string_view field) {
  if (!record.is_object()) throw DataError("record is not a JSON object");
  const auto it = record.find(field);
  if (it == record.end()) throw DataError("missing field '" + std::string(field) + "'");
  return *it;
}

std::string require_string(const json& record, std::string_view field) {
  const json& value = require(record, field);
  if (!value.is_string()) throw DataError("field '" + std::string(field) + "' must be a string");
  return value.get<std::string>();
}

double require_number(const json& record, std::string_view field) {
  const json& value = require(record, field);
  if (!value.is_number()) throw DataError("field '" + std::string(field) + "' must be a number");
  return value.get<double>();
}

std::vector<std::string> require_string_list(const json& record, std::string_view field) {
  const json& value = require(record, field);
  if (!value.is_array()) throw DataError("field '" + std::string(field) + "' must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) throw DataError("field '" + std::string(field) + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

// Everything in `record` not listed in `known`.
json extras_of(const json& record, std::initializer_list<std::string_view> known) {
  json extra = json::object();
  for (const auto& [key, value] : record.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) extra[key] = value;
  }
  return extra;
}

void merge_extras(json& record, const json& extra) {
  if (!extra.is_object()) return;
  for (const auto& [key, value] : extra.items()) {
    if (!record.contains(key)) record[key] = value;
  }
}

bool blank(std::string_view text) { return unicode::trim(text).empty(); }

template <class T, class F>
std::vector<T> load_records(const std::filesystem::path& path, F&& from_json) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      out.push_back(from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  return out;
}

template <class T>
void save_records(std::span<const T> records, const std::filesystem::path& path) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r));
  write_jsonl(path, lines);
}

std::vector<Utterance> read_tsv_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Utterance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (line_no == 1 && cols.size() == 4 && cols[0] == "id" && cols[2] == "index") continue;
    if (cols.size() != 4) {
      throw ParseError(path.string(), line_no, "expected 4 tab-separated columns (id, video_id, index, text)");
    }
    Utterance u;
    u.id = cols[0];
    u.video_id = cols[1];
    try {
      std::size_t consumed = 0;
      const long long index = std::stoll(cols[2], &consumed);
      if (consumed != cols[2].size() || index < 0) throw std::invalid_argument("index");
      u.index_in_video = static_cast<std::size_t>(index);
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "index must be a non-negative integer");
    }
    u.text = cols[3];
    if (u.id.empty()) throw ParseError(path.string(), line_no, "empty id");
    if (blank(u.text)) throw ParseError(path.string(), line_no, "empty text");
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

bool ParaphraseSet::operator==(const ParaphraseSet& other) const {
  return utterance_id == other.utterance_id && variants == other.variants && generator == other.generator &&
         strategy == other.strategy && scores == other.scores && status == other.status && extra == other.extra;
}

std::vector<std::string> EvalInstance::references() const {
  std::vector<std::string> refs;
  refs.reserve(1 + paraphrase_references.size());
  refs.push_back(canonical_reference);
  refs.insert(refs.end(), paraphrase_references.begin(), paraphrase_references.end());
  return refs;
}

std::string_view to_string(GenerationStrategy strategy) noexcept {
  switch (strategy) {
    case GenerationStrategy::sequential: return "sequential";
    case GenerationStrategy::iterative: return "iterative";
    case GenerationStrategy::sequential_context: return "sequential_context";
    case GenerationStrategy::iterative_context: return "iterative_context";
  }
  return "sequential";
}

std::string_view to_string(SetStatus status) noexcept {
  return status == SetStatus::complete ? "complete" : "missing";
}

GenerationStrategy parse_strategy(std::string_view name) {
  if (name == "sequential") return GenerationStrategy::sequential;
  if (name == "iterative") return GenerationStrategy::iterative;
  if (name == "sequential_context") return GenerationStrategy::sequential_context;
  if (name == "iterative_context") return GenerationStrategy::iterative_context;
  throw DataError("unknown strategy '" + std::string(name) + "'");
}

SetStatus parse_status(std::string_view name) {
  if (name == "complete") return SetStatus::complete;
  if (name == "missing") return SetStatus::missing;
  throw DataError("unknown status '" + std::string(name) + "'");
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "tsv") return CorpusFormat::tsv;
  throw DataError("unknown corpus format '" + std::string(name) + "'");
}

json to_json(const Utterance& u) {
  json j = {{"id", u.id}, {"video_id", u.video_id}, {"index", u.index_in_video}, {"text", u.text}};
  merge_extras(j, u.extra);
  return j;
}

json to_json(const ParaphraseSet& set) {
  json j = {{"utterance_id", set.utterance_id},
            {"generator", set.generator},
            {"strategy", to_string(set.strategy)},
            {"status", to_string(set.status)},
            {"variants", set.variants}};
  if (set.scores) {
    json scores = json::array();
    for (const auto& s : *set.scores) {
      scores.push_back({{"parascore", s.parascore}, {"bertscore_f1", s.bertscore_f1}, {"nld", s.nld}});
    }
    j["scores"] = std::move(scores);
  }
  merge_extras(j, set.extra);
  return j;
}

json to_json(const EvalInstance& x) {
  json j = {{"id", x.id},
            {"hypothesis", x.hypothesis},
            {"reference", x.canonical_reference},
            {"paraphrases", x.paraphrase_references}};
  merge_extras(j, x.extra);
  return j;
}

json to_json(const HumanRating& r) {
  return {{"instance_id", r.instance_id}, {"mean_rating", r.mean_rating}, {"n_annotators", r.n_annotators}};
}

json to_json(const TrainRecord& r) { return {{"utterance_id", r.utterance_id}, {"targets", r.targets}}; }

Utterance utterance_from_json(const json& record) {
  Utterance u;
  u.id = require_string(record, "id");
  u.video_id = require_string(record, "video_id");
  const json& index = require(record, "index");
  if (!index.is_number_integer() || index.get<long long>() < 0) {
    throw DataError("field 'index' must be a non-negative integer");
  }
  u.index_in_video = index.get<std::size_t>();
  u.text = require_string(record, "text");
  if (u.id.empty()) throw DataError("empty id");
  if (blank(u.text)) throw DataError("empty text for utterance '" + u.id + "'");
  u.extra = extras_of(record, {"id", "video_id", "index", "text"});
  return u;
}

ParaphraseSet paraphrase_set_from_json(const json& record) {
  ParaphraseSet set;
  set.utterance_id = require_string(record, "utterance_id");
  set.generator = require_string(record, "generator");
  set.strategy = parse_strategy(require_string(record, "strategy"));
  set.status = parse_status(require_string(record, "status"));
  set.variants = require_string_list(record, "variants");
  if (const auto it = record.find("scores"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("field 'scores' must be an array");
    std::vector<VariantScore> scores;
    for (const auto& s : *it) {
      scores.push_back({require_number(s, "parascore"), require_number(s, "bertscore_f1"), require_number(s, "nld")});
    }
    if (scores.size() != set.variants.size()) {
      throw DataError("set '" + set.utterance_id + "' has " + std::to_string(scores.size()) + " scores for " +
                      std::to_string(set.variants.size()) + " variants");
    }
    set.scores = std::move(scores);
  }
  if (set.status == SetStatus::missing && !set.variants.empty()) {
    throw DataError("set '" + set.utterance_id + "' is marked missing but carries variants");
  }
  set.extra = extras_of(record, {"utterance_id", "generator", "strategy", "status", "variants", "scores"});
  return set;
}

EvalInstance eval_instance_from_json(const json& record) {
  EvalInstance x;
  x.id = require_string(record, "id");
  x.hypothesis = require_string(record, "hypothesis");
  x.canonical_reference = require_string(record, "reference");
  if (record.contains("paraphrases")) x.paraphrase_references = require_string_list(record, "paraphrases");
  if (blank(x.hypothesis)) throw DataError("instance '" + x.id + "' has an empty hypothesis");
  if (blank(x.canonical_reference)) throw DataError("instance '" + x.id + "' has an empty reference");
  x.extra = extras_of(record, {"id", "hypothesis", "reference", "paraphrases"});
  return x;
}

HumanRating human_rating_from_json(const json& record) {
  HumanRating r;
  r.instance_id = require_string(record, "instance_id");
  r.mean_rating = require_number(record, "mean_rating");
  const json& n = require(record, "n_annotators");
  if (!n.is_number_integer() || n.get<long long>() < 1) {
    throw DataError("field 'n_annotators' must be a positive integer");
  }
  r.n_annotators = n.get<int>();
  if (!(r.mean_rating >= 0.0 && r.mean_rating <= 5.0)) {
    throw DataError("rating for '" + r.instance_id + "' outside [0, 5]");
  }
  return r;
}

TrainRecord train_record_from_json(const json& record) {
  TrainRecord r;
  r.utterance_id = require_string(record, "utterance_id");
  r.targets = require_string_list(record, "targets");
  if (r.targets.empty()) throw DataError("train record '" + r.utterance_id + "' has no targets");
  return r;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  return load_records<json>(path, [](json j) { return j; });
}

void write_jsonl(const std::filesystem::path& path, std::span<const json> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<Utterance> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::vector<Utterance> corpus = format == CorpusFormat::tsv ? read_tsv_corpus(path)
                                                              : load_records<Utterance>(path, utterance_from_json);

  std::unordered_set<std::string> ids;
  for (const auto& u : corpus) {
    if (!ids.insert(u.id).second) throw DataError("duplicate utterance id '" + u.id + "' in " + path.string());
  }

  std::stable_sort(corpus.begin(), corpus.end(), [](const Utterance& a, const Utterance& b) {
    return std::tie(a.video_id, a.index_in_video) < std::tie(b.video_id, b.index_in_video);
  });

  std::size_t renumbered = 0;
  for (std::size_t i = 0, start = 0; i < corpus.size(); ++i) {
    if (i > 0 && corpus[i].video_id != corpus[i - 1].video_id) start = i;
    if (i > start && corpus[i].index_in_video == corpus[i - 1].index_in_video) {
      throw DataError("duplicate position (" + corpus[i].video_id + ", " + std::to_string(corpus[i].index_in_video) +
                      ") in " + path.string());
    }
  }
  for (std::size_t i = 0, start = 0; i < corpus.size(); ++i) {
    if (i > 0 && corpus[i].video_id != corpus[i - 1].video_id) start = i;
    if (corpus[i].index_in_video != i - start) {
      corpus[i].index_in_video = i - start;
      ++renumbered;
    }
  }
  if (renumbered > 0) {
    spdlog::warn("{}: renumbered {} utterance indices to close gaps within videos", path.string(), renumbered);
  }
  return corpus;
}

void save_corpus(std::span<const Utterance> corpus, const std::filesystem::path& path) {
  save_records(corpus, path);
}

std::vector<ParaphraseSet> load_paraphrases(const std::filesystem::path& path) {
  return load_records<ParaphraseSet>(path, paraphrase_set_from_json);
}

void save_paraphrases(std::span<const ParaphraseSet> sets, const std::filesystem::path& path) {
  save_records(sets, path);
}

std::vector<EvalInstance> load_eval_instances(const std::filesystem::path& path) {
  return load_records<EvalInstance>(path, eval_instance_from_json);
}

void save_eval_instances(std::span<const EvalInstance> instances, const std::filesystem::path& path) {
  save_records(instances, path);
}

std::vector<HumanRating> load_ratings(const std::filesystem::path& path) {
  return load_records<HumanRating>(path, human_rating_from_json);
}

void save_ratings(std::span<const HumanRating> ratings, const std::filesystem::path& path) {
  save_records(ratings, path);
}

std::vector<TrainRecord> load_trainset(const std::filesystem::path& path) {
  return load_records<TrainRecord>(path, train_record_from_json);
}

void save_trainset(std::span<const TrainRecord> records, const std::filesystem::path& path) {
  save_records(records, path);
}

std::vector<TrainRecord> build_trainset(std::span<const Utterance> corpus, std::span<const ParaphraseSet> sets,
                                        double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DataError("threshold must lie in [0, 1]");

  std::unordered_map<std::string_view, const ParaphraseSet*> by_id;
  for (const auto& set : sets) by_id[set.utterance_id] = &set;

  std::vector<TrainRecord> records;
  records.reserve(corpus.size());
  for (const auto& u : corpus) {
    TrainRecord record{u.id, {u.text}};
    const auto it = by_id.find(u.id);
    if (it != by_id.end() && it->second->status == SetStatus::complete) {
      const ParaphraseSet& set = *it->second;
      if (!set.is_scored() && threshold > 0.0) {
        throw DataError("paraphrase set for '" + u.id + "' is unscored; run scoring before filtering at threshold " +
                        std::to_string(threshold));
      }
      for (std::size_t i = 0; i < set.variants.size(); ++i) {
        if (!set.is_scored() || (*set.scores)[i].parascore >= threshold) record.targets.push_back(set.variants[i]);
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace paraeval
