#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "paraeval/textnorm.hpp"

namespace paraeval {

/// Edit distance over Unicode code points (unit-cost insert/delete/substitute).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// levenshtein(a, b) divided by the code-point length of the longer string,
/// both sides NFC-normalized first. nld("", "") == 0.
double nld(std::string_view a, std::string_view b);

inline constexpr int kMaxBleuOrder = 4;

enum class Smoothing {
  /// Each zero-match order n gets precision 1 / (2^k * total_n), k counting
  /// the zero-match orders seen so far (mteval "exp" smoothing).
  exp_floor,
  none,
};

/// Sufficient statistics for BLEU; additive across segments.
struct BleuStats {
  std::array<std::int64_t, kMaxBleuOrder> correct{};
  std::array<std::int64_t, kMaxBleuOrder> total{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other) noexcept;
  bool operator==(const BleuStats&) const = default;
};

struct BleuBreakdown {
  /// BLEU-1..BLEU-4 on a 0..100 scale; BLEU-n uses orders 1..n.
  std::array<double, kMaxBleuOrder> bleu_n{};
  /// Possibly smoothed n-gram precisions in [0, 1].
  std::array<double, kMaxBleuOrder> precisions{};
  double brevity_penalty = 0.0;
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  double bleu4() const noexcept { return bleu_n[kMaxBleuOrder - 1]; }
  bool operator==(const BleuBreakdown&) const = default;
};

/// Clipped n-gram matches against the per-n-gram maximum over references;
/// the reference length is the one closest to the hypothesis length, ties
/// going to the shorter reference. Requires at least one reference.
BleuStats bleu_statistics(const TokenSequence& hyp, std::span<const TokenSequence> refs);

/// `effective_order` stops the geometric mean at the highest order for which
/// the hypothesis has any n-grams.
BleuBreakdown bleu_from_statistics(const BleuStats& stats, Smoothing smoothing, bool effective_order);

BleuBreakdown sentence_bleu(const TokenSequence& hyp, std::span<const TokenSequence> refs,
                            Smoothing smoothing = Smoothing::exp_floor);

struct BleuPair {
  TokenSequence hyp;
  std::vector<TokenSequence> refs;
};

/// Micro-averaged corpus BLEU without smoothing. Throws DataError on an empty
/// corpus or a pair without references.
BleuBreakdown corpus_bleu(std::span<const BleuPair> pairs);

/// Smoothed sentence BLEU-4 of raw strings under BLEU tokenization.
double sentence_bleu4(std::string_view hyp, std::string_view ref);

struct RougeLScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;

  bool operator==(const RougeLScore&) const = default;
};

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// LCS-based ROUGE-L with beta = 1. An empty side scores all zeros.
RougeLScore rouge_l(const TokenSequence& hyp, const TokenSequence& ref);

/// ROUGE-L F of raw strings under ROUGE tokenization.
double rouge_l_f(std::string_view hyp, std::string_view ref);

}  // namespace paraeval
