#pragma once

// UTF-8 helpers backed by ICU. All text inside the library is NFC-normalized
// UTF-8, and every "character" count is a count of code points.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "shallowlab/error.hpp"

namespace shallowlab::unicode {

/// Byte offset of the first invalid sequence, or npos when the text is valid.
inline std::size_t find_invalid_utf8(std::string_view text) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return static_cast<std::size_t>(start);
  }
  return std::string_view::npos;
}

inline bool is_valid_utf8(std::string_view text) {
  return find_invalid_utf8(text) == std::string_view::npos;
}

inline void require_valid_utf8(std::string_view text, std::string_view what) {
  if (const auto at = find_invalid_utf8(text); at != std::string_view::npos) {
    throw Error(ErrorKind::invalid_encoding,
                std::string(what) + ": invalid UTF-8 at byte offset " +
                    std::to_string(at));
  }
}

/// NFC normalization. Throws InvalidEncoding on malformed input.
inline std::string to_nfc(std::string_view text) {
  require_valid_utf8(text, "input");
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::invalid_encoding, "ICU NFC normalizer unavailable");
  }
  const auto source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  if (nfc->isNormalized(source, status) && U_SUCCESS(status)) {
    return std::string(text);
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::invalid_encoding, "NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

/// Splits valid UTF-8 into one view per code point.
inline std::vector<std::string_view> code_points(std::string_view text) {
  std::vector<std::string_view> out;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.emplace_back(text.data() + start, static_cast<std::size_t>(i - start));
  }
  return out;
}

inline std::size_t code_point_length(std::string_view text) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  std::size_t count = 0;
  while (i < length) {
    U8_FWD_1(bytes, i, length);
    ++count;
  }
  return count;
}

/// Decodes the code point starting at byte offset `at`, advancing `at`.
inline char32_t next_code_point(std::string_view text, std::size_t& at) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  auto i = static_cast<std::int32_t>(at);
  UChar32 c;
  U8_NEXT(bytes, i, static_cast<std::int32_t>(text.size()), c);
  at = static_cast<std::size_t>(i);
  return c < 0 ? U'�' : static_cast<char32_t>(c);
}

inline bool is_whitespace(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

inline bool contains_whitespace(std::string_view text) {
  std::size_t at = 0;
  while (at < text.size()) {
    if (is_whitespace(next_code_point(text, at))) return true;
  }
  return false;
}

inline std::string encode(char32_t c) {
  std::string out;
  std::uint8_t buffer[U8_MAX_LENGTH];
  std::int32_t length = 0;
  UBool error = false;
  U8_APPEND(buffer, length, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
  (void)error;
  out.assign(reinterpret_cast<const char*>(buffer),
             static_cast<std::size_t>(length));
  return out;
}

}  // namespace shallowlab::unicode
