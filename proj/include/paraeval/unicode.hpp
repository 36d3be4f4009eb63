#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the tokenizers and the edit-distance kernels.
namespace paraeval::unicode {

/// Decodes UTF-8 into code points. Malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view text);

/// Canonical composition (NFC).
std::string nfc(std::string_view text);

/// Whitespace as understood by Python's `str.split()` with no arguments.
/// BLEU tokenization must agree with that definition to stay comparable.
bool is_space(char32_t cp) noexcept;

/// Splits on runs of `is_space` code points, dropping empty pieces.
std::vector<std::string_view> split_whitespace(std::string_view text);

std::string_view trim(std::string_view text);
std::string_view rstrip(std::string_view text);

}  // namespace paraeval::unicode
