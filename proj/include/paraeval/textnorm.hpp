#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paraeval {

/// Tokens of one sentence. Tokens are non-empty and contain no whitespace.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_text;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  /// Tokens joined by single spaces.
  std::string joined() const;

  bool operator==(const TokenSequence&) const = default;
};

/// The `13a` tokenization used by mteval-v13a and sacrebleu: unescapes a few
/// HTML entities, isolates ASCII symbols, splits `.` and `,` unless they sit
/// between digits, and splits a `-` that follows a digit.
TokenSequence tokenize_13a(std::string_view text);

/// Tokenization applied before BLEU: trailing whitespace is dropped, then
/// `tokenize_13a`.
TokenSequence tokenize_for_bleu(std::string_view text);

/// ROUGE tokenization: ASCII-lowercase, every run of characters outside
/// [a-z0-9] becomes a separator.
TokenSequence tokenize_rouge(std::string_view text);

/// Number of maximal non-whitespace runs.
std::size_t word_count(std::string_view text);

inline constexpr std::size_t kMinParaphraseWords = 4;
inline constexpr std::size_t kMaxParaphraseWords = 30;

/// Removes one leading list marker (`-`, `*`, `•`, `3.`, `3)`, `b.`, `b)`)
/// followed by whitespace. Returns the input unchanged when there is none.
std::string_view strip_enumeration_marker(std::string_view line);

/// Strips one pair of matching quotes wrapping the whole line.
std::string_view strip_wrapping_quotes(std::string_view line);

/// True for lead-in lines such as "Here are five paraphrases:".
bool is_boilerplate(std::string_view line);

/// Cleans a raw LLM response into exactly `k_expected` paraphrases, or
/// nullopt ("missing") when any other number of usable lines remains.
std::optional<std::vector<std::string>> normalize_generation(std::string_view raw, std::size_t k_expected);

}  // namespace paraeval
