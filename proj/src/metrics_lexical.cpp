#include "paraeval/metrics_lexical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <unordered_map>

#include "paraeval/errors.hpp"
#include "paraeval/unicode.hpp"

namespace paraeval {
namespace {

// Keys are n-grams joined by single spaces; tokens carry no whitespace, so
// the order of an n-gram is recoverable and one map serves all orders.
using NgramCounts = std::unordered_map<std::string, std::int64_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens) {
  NgramCounts counts;
  counts.reserve(tokens.size() * kMaxBleuOrder);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string key;
    for (int n = 1; n <= kMaxBleuOrder && i + n <= tokens.size(); ++n) {
      if (n > 1) key.push_back(' ');
      key += tokens[i + n - 1];
      ++counts[key];
    }
  }
  return counts;
}

int order_of(const std::string& key) {
  return 1 + static_cast<int>(std::count(key.begin(), key.end(), ' '));
}

std::int64_t closest_ref_len(std::int64_t hyp_len, std::span<const TokenSequence> refs) {
  std::int64_t best_len = -1;
  std::int64_t best_diff = -1;
  for (const auto& ref : refs) {
    const auto len = static_cast<std::int64_t>(ref.size());
    const std::int64_t diff = std::llabs(hyp_len - len);
    if (best_diff < 0 || diff < best_diff || (diff == best_diff && len < best_len)) {
      best_diff = diff;
      best_len = len;
    }
  }
  return best_len;
}

// Mirrors the reference implementation: log(0) is a large negative constant
// rather than -inf, so a zero precision drives the score to exactly 0.
double safe_log(double x) { return x == 0.0 ? -9999999999.0 : std::log(x); }

// BLEU over orders 1..max_order; fills `precisions` (percent) as a side effect.
double bleu_score(const BleuStats& stats, Smoothing smoothing, bool effective_order, int max_order, double bp,
                  std::array<double, kMaxBleuOrder>& precisions) {
  precisions.fill(0.0);
  bool any_match = false;
  for (int n = 0; n < max_order; ++n) any_match = any_match || stats.correct[n] != 0;
  if (!any_match) return 0.0;

  double smooth = 1.0;
  int eff_order = max_order;
  for (int n = 1; n <= max_order; ++n) {
    if (stats.total[n - 1] == 0) break;
    if (effective_order) eff_order = n;
    if (stats.correct[n - 1] == 0) {
      if (smoothing == Smoothing::exp_floor) {
        smooth *= 2.0;
        precisions[n - 1] = 100.0 / (smooth * static_cast<double>(stats.total[n - 1]));
      }
    } else {
      precisions[n - 1] = 100.0 * static_cast<double>(stats.correct[n - 1]) / static_cast<double>(stats.total[n - 1]);
    }
  }
  double log_sum = 0.0;
  for (int n = 0; n < eff_order; ++n) log_sum += safe_log(precisions[n]);
  return bp * std::exp(log_sum / eff_order);
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) noexcept {
  for (int n = 0; n < kMaxBleuOrder; ++n) {
    correct[n] += other.correct[n];
    total[n] += other.total[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::u32string s = unicode::decode_utf8(a);
  std::u32string t = unicode::decode_utf8(b);

  // Common prefixes and suffixes never take part in an optimal alignment.
  const auto [sp, tp] = std::mismatch(s.begin(), s.end(), t.begin(), t.end());
  s.erase(s.begin(), sp);
  t.erase(t.begin(), tp);
  const auto [sr, tr] = std::mismatch(s.rbegin(), s.rend(), t.rbegin(), t.rend());
  s.erase(sr.base(), s.end());
  t.erase(tr.base(), t.end());

  if (s.size() < t.size()) std::swap(s, t);
  if (t.empty()) return s.size();

  std::vector<std::size_t> row(t.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= s.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (s[i - 1] == t[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[t.size()];
}

double nld(std::string_view a, std::string_view b) {
  const std::string na = unicode::nfc(a);
  const std::string nb = unicode::nfc(b);
  const std::size_t longest = std::max(unicode::decode_utf8(na).size(), unicode::decode_utf8(nb).size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(na, nb)) / static_cast<double>(longest);
}

BleuStats bleu_statistics(const TokenSequence& hyp, std::span<const TokenSequence> refs) {
  if (refs.empty()) throw DataError("BLEU needs at least one reference");

  NgramCounts ref_max;
  for (const auto& ref : refs) {
    for (const auto& [ngram, count] : count_ngrams(ref.tokens)) {
      auto& slot = ref_max[ngram];
      slot = std::max(slot, count);
    }
  }

  BleuStats stats;
  stats.hyp_len = static_cast<std::int64_t>(hyp.size());
  stats.ref_len = closest_ref_len(stats.hyp_len, refs);
  for (const auto& [ngram, count] : count_ngrams(hyp.tokens)) {
    const int n = order_of(ngram) - 1;
    stats.total[n] += count;
    if (const auto it = ref_max.find(ngram); it != ref_max.end()) stats.correct[n] += std::min(count, it->second);
  }
  return stats;
}

BleuBreakdown bleu_from_statistics(const BleuStats& stats, Smoothing smoothing, bool effective_order) {
  BleuBreakdown out;
  out.hyp_len = stats.hyp_len;
  out.ref_len = stats.ref_len;
  if (stats.hyp_len < stats.ref_len) {
    out.brevity_penalty =
        stats.hyp_len > 0 ? std::exp(1.0 - static_cast<double>(stats.ref_len) / static_cast<double>(stats.hyp_len))
                          : 0.0;
  } else {
    out.brevity_penalty = 1.0;
  }

  std::array<double, kMaxBleuOrder> percent{};
  for (int order = 1; order <= kMaxBleuOrder; ++order) {
    out.bleu_n[order - 1] = bleu_score(stats, smoothing, effective_order, order, out.brevity_penalty, percent);
  }
  for (int n = 0; n < kMaxBleuOrder; ++n) out.precisions[n] = percent[n] / 100.0;
  return out;
}

BleuBreakdown sentence_bleu(const TokenSequence& hyp, std::span<const TokenSequence> refs, Smoothing smoothing) {
  return bleu_from_statistics(bleu_statistics(hyp, refs), smoothing, /*effective_order=*/true);
}

BleuBreakdown corpus_bleu(std::span<const BleuPair> pairs) {
  if (pairs.empty()) throw DataError("corpus BLEU over an empty corpus");
  BleuStats total;
  for (const auto& pair : pairs) total += bleu_statistics(pair.hyp, pair.refs);
  return bleu_from_statistics(total, Smoothing::none, /*effective_order=*/false);
}

double sentence_bleu4(std::string_view hyp, std::string_view ref) {
  const TokenSequence refs[] = {tokenize_for_bleu(ref)};
  return sentence_bleu(tokenize_for_bleu(hyp), refs).bleu4();
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeLScore rouge_l(const TokenSequence& hyp, const TokenSequence& ref) {
  if (hyp.empty() || ref.empty()) return {};
  const auto lcs = static_cast<double>(lcs_length(hyp.tokens, ref.tokens));
  RougeLScore score;
  score.precision = lcs / static_cast<double>(hyp.size());
  score.recall = lcs / static_cast<double>(ref.size());
  const double sum = score.precision + score.recall;
  score.f = sum > 0.0 ? 2.0 * score.precision * score.recall / sum : 0.0;
  return score;
}

double rouge_l_f(std::string_view hyp, std::string_view ref) {
  return rouge_l(tokenize_rouge(hyp), tokenize_rouge(ref)).f;
}

}  // namespace paraeval
