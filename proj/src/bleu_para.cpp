#include "paraeval/bleu_para.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "paraeval/errors.hpp"
#include "paraeval/parallel.hpp"

namespace paraeval {

SentenceMetric bleu4_selector() {
  return [](std::string_view hyp, std::string_view ref) { return sentence_bleu4(hyp, ref); };
}

SentenceMetric rouge_l_selector() {
  return [](std::string_view hyp, std::string_view ref) { return rouge_l_f(hyp, ref); };
}

SelectionResult select_best_reference(std::string_view hyp, std::span<const std::string> refs,
                                      const SentenceMetric& metric) {
  if (refs.empty()) throw DataError("reference selection needs at least one reference");
  SelectionResult out;
  out.per_reference_scores.reserve(refs.size());
  for (const auto& ref : refs) out.per_reference_scores.push_back(metric(hyp, ref));
  const auto best = std::max_element(out.per_reference_scores.begin(), out.per_reference_scores.end());
  out.chosen_index = static_cast<std::size_t>(best - out.per_reference_scores.begin());
  out.chosen_score = *best;
  return out;
}

std::string_view to_string(ParaMode mode) noexcept {
  return mode == ParaMode::select_best ? "select_best" : "multi_ref";
}

std::string_view to_string(ReportMode mode) noexcept {
  return mode == ReportMode::no_paraphrases ? "no_paraphrases" : "with_paraphrases";
}

ParaMode parse_para_mode(std::string_view name) {
  if (name == "select_best") return ParaMode::select_best;
  if (name == "multi_ref") return ParaMode::multi_ref;
  throw ConfigError("unknown BLEU_para mode '" + std::string(name) + "' (expected select_best or multi_ref)");
}

namespace {

void require_references(std::span<const EvalInstance> instances) {
  if (instances.empty()) throw DataError("evaluation needs at least one instance");
  for (const auto& inst : instances) {
    if (inst.canonical_reference.empty()) throw DataError("instance " + inst.id + " has no canonical reference");
  }
}

// Summation over sorted values keeps the mean independent of instance order.
double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double best_rouge(const EvalInstance& inst) {
  const auto refs = inst.references();
  return select_best_reference(inst.hypothesis, refs, rouge_l_selector()).chosen_score;
}

}  // namespace

EvalReport eval_no_paraphrases(std::span<const EvalInstance> instances) {
  require_references(instances);
  std::vector<BleuPair> pairs(instances.size());
  std::vector<double> rouge(instances.size());
  std::vector<SelectionResult> selections(instances.size());
  parallel_for(instances.size(), 0, [&](std::size_t i) {
    const auto& inst = instances[i];
    pairs[i].hyp = tokenize_for_bleu(inst.hypothesis);
    pairs[i].refs = {tokenize_for_bleu(inst.canonical_reference)};
    rouge[i] = rouge_l_f(inst.hypothesis, inst.canonical_reference);
    selections[i].instance_id = inst.id;
    selections[i].chosen_score = sentence_bleu(pairs[i].hyp, pairs[i].refs).bleu4();
    selections[i].per_reference_scores = {selections[i].chosen_score};
  });

  EvalReport report;
  report.mode = ReportMode::no_paraphrases;
  report.bleu = corpus_bleu(pairs);
  report.rouge_l = order_free_mean(std::move(rouge));
  report.selections = std::move(selections);
  return report;
}

EvalReport bleu_para_corpus(std::span<const EvalInstance> instances, ParaMode mode, const SentenceMetric& selector) {
  require_references(instances);
  std::vector<BleuPair> pairs(instances.size());
  std::vector<double> rouge(instances.size());
  std::vector<SelectionResult> selections(mode == ParaMode::select_best ? instances.size() : 0);
  parallel_for(instances.size(), 0, [&](std::size_t i) {
    const auto& inst = instances[i];
    const auto refs = inst.references();
    pairs[i].hyp = tokenize_for_bleu(inst.hypothesis);
    if (mode == ParaMode::select_best) {
      auto selection = select_best_reference(inst.hypothesis, refs, selector);
      selection.instance_id = inst.id;
      pairs[i].refs = {tokenize_for_bleu(refs[selection.chosen_index])};
      selections[i] = std::move(selection);
    } else {
      for (const auto& ref : refs) pairs[i].refs.push_back(tokenize_for_bleu(ref));
    }
    rouge[i] = best_rouge(inst);
  });

  EvalReport report;
  report.mode = ReportMode::with_paraphrases;
  report.para_mode = mode;
  report.bleu = corpus_bleu(pairs);
  report.rouge_l = order_free_mean(std::move(rouge));
  report.selections = std::move(selections);
  return report;
}

std::vector<InstanceScores> instance_scores(std::span<const EvalInstance> instances) {
  require_references(instances);
  std::vector<InstanceScores> out(instances.size());
  parallel_for(instances.size(), 0, [&](std::size_t i) {
    const auto& inst = instances[i];
    const auto refs = inst.references();
    const auto bleu = select_best_reference(inst.hypothesis, refs, bleu4_selector());
    const auto rouge = select_best_reference(inst.hypothesis, refs, rouge_l_selector());
    out[i] = {inst.id, bleu.per_reference_scores.front(), bleu.chosen_score, rouge.per_reference_scores.front(),
              rouge.chosen_score, bleu.chosen_index};
  });
  return out;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j = {{"mode", to_string(report.mode)},
                      {"bleu", report.bleu.bleu_n},
                      {"rouge_l", report.rouge_l}};
  if (report.mode == ReportMode::with_paraphrases) j["para_mode"] = to_string(report.para_mode);
  return j;
}

nlohmann::json to_json(const SelectionResult& selection) {
  return {{"instance_id", selection.instance_id},
          {"chosen_index", selection.chosen_index},
          {"chosen_score", selection.chosen_score}};
}

nlohmann::json to_json(const InstanceScores& scores) {
  return {{"instance_id", scores.instance_id}, {"bleu", scores.bleu},
          {"bleu_para", scores.bleu_para},     {"rouge_l", scores.rouge_l},
          {"rouge_l_para", scores.rouge_l_para}, {"chosen_index", scores.chosen_index}};
}

InstanceScores instance_scores_from_json(const nlohmann::json& record) {
  try {
    InstanceScores s;
    s.instance_id = record.at("instance_id").get<std::string>();
    s.bleu = record.at("bleu").get<double>();
    s.bleu_para = record.at("bleu_para").get<double>();
    s.rouge_l = record.at("rouge_l").get<double>();
    s.rouge_l_para = record.at("rouge_l_para").get<double>();
    s.chosen_index = record.at("chosen_index").get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed instance score record: ") + e.what());
  }
}

std::string format_eval_table(std::span<const EvalReport> reports) {
  std::string out = fmt::format("{:<42}{:>8}{:>8}{:>8}{:>8}{:>9}\n", "Setting", "BLEU-1", "BLEU-2", "BLEU-3",
                                "BLEU-4", "ROUGE-L");
  for (const auto& r : reports) {
    std::string label = r.mode == ReportMode::no_paraphrases
                            ? "Evaluation without paraphrases"
                            : fmt::format("Evaluation with paraphrases ({})", to_string(r.para_mode));
    out += fmt::format("{:<42}{:>8.2f}{:>8.2f}{:>8.2f}{:>8.2f}{:>9.2f}\n", label, r.bleu.bleu_n[0], r.bleu.bleu_n[1],
                       r.bleu.bleu_n[2], r.bleu.bleu_n[3], 100.0 * r.rouge_l);
  }
  return out;
}

}  // namespace paraeval
