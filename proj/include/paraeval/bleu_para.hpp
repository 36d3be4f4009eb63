#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "paraeval/dataset_io.hpp"
#include "paraeval/metrics_lexical.hpp"

namespace paraeval {

/// Per-sentence metric: (hypothesis, reference) -> score, higher is better.
using SentenceMetric = std::function<double(std::string_view hyp, std::string_view ref)>;

/// Smoothed sentence BLEU-4 on 13a tokens, 0..100.
SentenceMetric bleu4_selector();
/// ROUGE-L F, 0..1.
SentenceMetric rouge_l_selector();

struct SelectionResult {
  std::string instance_id;
  /// 0 is the canonical reference; i >= 1 is the i-th paraphrase.
  std::size_t chosen_index = 0;
  double chosen_score = 0.0;
  std::vector<double> per_reference_scores;
};

/// Scores every reference independently; the lowest index wins ties.
/// Throws DataError on an empty reference list.
SelectionResult select_best_reference(std::string_view hyp, std::span<const std::string> refs,
                                      const SentenceMetric& metric = bleu4_selector());

enum class ParaMode { select_best, multi_ref };
enum class ReportMode { no_paraphrases, with_paraphrases };

std::string_view to_string(ParaMode mode) noexcept;
std::string_view to_string(ReportMode mode) noexcept;
ParaMode parse_para_mode(std::string_view name);

/// Per-instance view of one evaluation, usable as correlation input.
struct InstanceScores {
  std::string instance_id;
  /// Smoothed sentence BLEU-4 against the canonical reference.
  double bleu = 0.0;
  /// Smoothed sentence BLEU-4 against the best-scoring reference.
  double bleu_para = 0.0;
  double rouge_l = 0.0;
  double rouge_l_para = 0.0;
  /// Reference chosen by the BLEU selector.
  std::size_t chosen_index = 0;
};

struct EvalReport {
  ReportMode mode = ReportMode::no_paraphrases;
  /// Only meaningful in with_paraphrases mode.
  ParaMode para_mode = ParaMode::select_best;
  BleuBreakdown bleu;
  /// Mean over instances of the per-instance ROUGE-L F.
  double rouge_l = 0.0;
  /// BLEU selections, one per instance in input order; empty for multi_ref.
  std::vector<SelectionResult> selections;
};

/// Corpus BLEU and mean ROUGE-L against canonical references only.
EvalReport eval_no_paraphrases(std::span<const EvalInstance> instances);

/// BLEU_para. select_best: corpus BLEU over the per-instance best reference
/// under `selector`. multi_ref: corpus BLEU with every reference clipped
/// jointly. ROUGE-L is the mean of per-instance best F in both modes.
EvalReport bleu_para_corpus(std::span<const EvalInstance> instances, ParaMode mode = ParaMode::select_best,
                            const SentenceMetric& selector = bleu4_selector());

/// Sentence-level scores for every instance, in input order.
std::vector<InstanceScores> instance_scores(std::span<const EvalInstance> instances);

/// {"mode", "bleu": [b1..b4], "rouge_l"} plus "para_mode" when paraphrases are used.
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const SelectionResult& selection);
nlohmann::json to_json(const InstanceScores& scores);
InstanceScores instance_scores_from_json(const nlohmann::json& record);

/// Plain-text table with BLEU-1..4 and ROUGE-L columns, one row per report.
std::string format_eval_table(std::span<const EvalReport> reports);

}  // namespace paraeval
