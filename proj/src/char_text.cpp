#include "ballot/char_text.hpp"

#include <cctype>

#include "ballot/error.hpp"

namespace ballot {

namespace {

constexpr std::string_view kSymbols =
    "abcdefghijklmnopqrstuvwxyz"
    "0123456789"
    " "
    "-,;.!?:'\"/\\|_@#$%^&*~`+=<>()[]{}";

static_assert(kSymbols.size() == kAlphabetSize - 1);

}  // namespace

Alphabet::Alphabet() : symbols_(kSymbols) {
  lookup_.fill(kUnknown);
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    lookup_[static_cast<unsigned char>(symbols_[i])] = static_cast<int>(i);
}

const Alphabet& Alphabet::standard() {
  static const Alphabet alphabet;
  return alphabet;
}

std::optional<char> Alphabet::symbol(int index) const {
  if (index < 0 || index >= static_cast<int>(symbols_.size())) return std::nullopt;
  return symbols_[static_cast<std::size_t>(index)];
}

CharMatrix encode_tweet(std::string_view text, const Alphabet& alphabet, int max_chars) {
  CharMatrix m = CharMatrix::Zero(max_chars, alphabet.size());
  int row = 0;
  for (std::size_t i = 0; i < text.size() && row < max_chars; ++row) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      m(row, alphabet.index_of(static_cast<unsigned char>(std::tolower(c)))) = 1;
      ++i;
      continue;
    }
    // Multi-byte UTF-8 sequence: one code point, one unknown row.
    m(row, Alphabet::kUnknown) = 1;
    ++i;
    while (i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) ++i;
  }
  return m;
}

}  // namespace ballot
