#include "paraeval/textnorm.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "paraeval/unicode.hpp"

namespace paraeval {
namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  for (std::size_t hit; (hit = s.find(from, pos)) != std::string::npos; pos = hit + from.size()) {
    out.append(s, pos, hit - pos);
    out.append(to);
  }
  out.append(s, pos);
  s = std::move(out);
}

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_period_or_comma(char c) noexcept { return c == '.' || c == ','; }

// { | } ~ [ \ ] ^ _ ` space ! " # $ % & ( ) * + : ; < = > ? @ /
bool is_isolated_symbol(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 0x7B && u <= 0x7E) || (u >= 0x5B && u <= 0x60) || (u >= 0x20 && u <= 0x26) ||
         (u >= 0x28 && u <= 0x2B) || (u >= 0x3A && u <= 0x40) || u == 0x2F;
}

// Left-to-right, non-overlapping rewrite of two-character matches, the way a
// regex substitution of a two-character pattern proceeds.
template <class First, class Second, class Emit>
std::string rewrite_pairs(const std::string& s, First first, Second second, Emit emit) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && first(s[i]) && second(s[i + 1])) {
      emit(out, s[i], s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

TokenSequence from_pieces(std::string_view text, const std::string& spaced) {
  TokenSequence seq;
  seq.source_text = std::string(text);
  for (auto piece : unicode::split_whitespace(spaced)) seq.tokens.emplace_back(piece);
  return seq;
}

bool starts_with_word(std::string_view lowered, std::string_view prefix) {
  if (!lowered.starts_with(prefix)) return false;
  if (lowered.size() == prefix.size()) return true;
  const auto next = static_cast<unsigned char>(lowered[prefix.size()]);
  return !std::isalpha(next);
}

constexpr std::array<std::string_view, 6> kBoilerplatePrefixes = {
    "here are", "here is", "sure", "paraphrases", "of course", "certainly"};

constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022

// Offset of the first non-space character at or after `pos`.
std::size_t skip_spaces(std::string_view s, std::size_t pos) {
  const auto trimmed = unicode::trim(s.substr(pos));
  if (trimmed.empty()) return s.size();
  return static_cast<std::size_t>(trimmed.data() - s.data());
}

}  // namespace

std::string TokenSequence::joined() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

TokenSequence tokenize_13a(std::string_view text) {
  std::string line(text);
  replace_all(line, "<skipped>", "");
  replace_all(line, "-\n", "");
  replace_all(line, "\n", " ");
  if (line.find('&') != std::string::npos) {
    replace_all(line, "&quot;", "\"");
    replace_all(line, "&amp;", "&");
    replace_all(line, "&lt;", "<");
    replace_all(line, "&gt;", ">");
  }

  std::string spaced;
  spaced.reserve(line.size() * 2 + 2);
  spaced.push_back(' ');
  for (char c : line) {
    if (is_isolated_symbol(c)) {
      spaced.push_back(' ');
      spaced.push_back(c);
      spaced.push_back(' ');
    } else {
      spaced.push_back(c);
    }
  }
  spaced.push_back(' ');

  const auto not_digit = [](char c) { return !is_digit(c); };
  spaced = rewrite_pairs(spaced, not_digit, is_period_or_comma, [](std::string& out, char a, char b) {
    out.push_back(a);
    out.push_back(' ');
    out.push_back(b);
    out.push_back(' ');
  });
  spaced = rewrite_pairs(spaced, is_period_or_comma, not_digit, [](std::string& out, char a, char b) {
    out.push_back(' ');
    out.push_back(a);
    out.push_back(' ');
    out.push_back(b);
  });
  spaced = rewrite_pairs(spaced, is_digit, [](char c) { return c == '-'; }, [](std::string& out, char a, char b) {
    out.push_back(a);
    out.push_back(' ');
    out.push_back(b);
    out.push_back(' ');
  });
  return from_pieces(text, spaced);
}

TokenSequence tokenize_for_bleu(std::string_view text) {
  TokenSequence seq = tokenize_13a(unicode::rstrip(text));
  seq.source_text = std::string(text);
  return seq;
}

TokenSequence tokenize_rouge(std::string_view text) {
  std::string spaced(text);
  for (char& c : spaced) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 'A' && u <= 'Z') {
      c = static_cast<char>(u - 'A' + 'a');
    } else if (!((u >= 'a' && u <= 'z') || (u >= '0' && u <= '9'))) {
      c = ' ';
    }
  }
  return from_pieces(text, spaced);
}

std::size_t word_count(std::string_view text) { return unicode::split_whitespace(text).size(); }

std::string_view strip_enumeration_marker(std::string_view line) {
  const std::string_view body = line.substr(skip_spaces(line, 0));
  std::size_t marker_end = 0;
  if (body.starts_with('-') || body.starts_with('*')) {
    marker_end = 1;
  } else if (body.starts_with(kBullet)) {
    marker_end = kBullet.size();
  } else if (!body.empty() && std::isdigit(static_cast<unsigned char>(body[0]))) {
    std::size_t i = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
    if (i < body.size() && (body[i] == '.' || body[i] == ')')) marker_end = i + 1;
  } else if (body.size() >= 2 && std::isalpha(static_cast<unsigned char>(body[0])) &&
             static_cast<unsigned char>(body[0]) < 0x80 && (body[1] == '.' || body[1] == ')')) {
    marker_end = 2;
  }
  if (marker_end == 0) return line;

  const std::string_view rest = body.substr(marker_end);
  const std::size_t content = skip_spaces(rest, 0);
  if (content == 0 || rest.empty()) return line;  // the marker must be followed by whitespace
  return rest.substr(content);
}

std::string_view strip_wrapping_quotes(std::string_view line) {
  struct QuotePair {
    std::string_view open;
    std::string_view close;
  };
  static constexpr std::array<QuotePair, 5> kPairs = {{
      {"\"", "\""},
      {"'", "'"},
      {"\xE2\x80\x9C", "\xE2\x80\x9D"},  // “ ”
      {"\xE2\x80\x98", "\xE2\x80\x99"},  // ‘ ’
      {"\xC2\xAB", "\xC2\xBB"},          // « »
  }};
  for (const auto& [open, close] : kPairs) {
    if (line.size() < open.size() + close.size() || !line.starts_with(open) || !line.ends_with(close)) continue;
    const std::string_view inner = line.substr(open.size(), line.size() - open.size() - close.size());
    // A quote inside means the outer marks belong to separate quotations.
    if (inner.find(open) != std::string_view::npos || inner.find(close) != std::string_view::npos) continue;
    return inner;
  }
  return line;
}

bool is_boilerplate(std::string_view line) {
  const std::string_view trimmed = unicode::trim(line);
  if (trimmed.ends_with(':')) return true;
  std::string lowered(trimmed);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) {
    return static_cast<char>(c < 0x80 ? std::tolower(c) : c);
  });
  return std::any_of(kBoilerplatePrefixes.begin(), kBoilerplatePrefixes.end(),
                     [&](std::string_view prefix) { return starts_with_word(lowered, prefix); });
}

std::optional<std::vector<std::string>> normalize_generation(std::string_view raw, std::size_t k_expected) {
  const std::string text = unicode::nfc(raw);
  std::vector<std::string> kept;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = unicode::trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;

    if (line.empty() || is_boilerplate(line)) continue;
    line = unicode::trim(strip_enumeration_marker(line));
    line = unicode::trim(strip_wrapping_quotes(line));
    if (line.empty() || is_boilerplate(line)) continue;

    const std::size_t words = word_count(line);
    if (words < kMinParaphraseWords || words > kMaxParaphraseWords) continue;
    kept.emplace_back(line);
  }
  if (kept.size() != k_expected) return std::nullopt;
  return kept;
}

}  // namespace paraeval
