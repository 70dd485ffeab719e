#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ballot {

// One-hot character matrix: one row per character position, one column per
// alphabet symbol. Rows past the end of the text are all zero.
using CharMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kMaxChars = 150;
inline constexpr int kAlphabetSize = 70;

class Alphabet {
 public:
  static constexpr int kUnknown = kAlphabetSize - 1;

  // The canonical 70-symbol alphabet. Symbol order is part of the model file format.
  static const Alphabet& standard();

  int size() const { return kAlphabetSize; }

  // Index of an already-lowercased byte, or kUnknown.
  int index_of(unsigned char c) const { return lookup_[c]; }

  // Symbol at an index; the unknown slot has no symbol.
  std::optional<char> symbol(int index) const;

  // The 69 printable symbols in index order.
  std::string_view symbols() const { return symbols_; }

 private:
  Alphabet();

  std::string symbols_;
  std::array<int, 256> lookup_{};
};

// Encodes lowercased text one code point per row. Any non-ASCII code point
// maps to the unknown symbol; text beyond `max_chars` code points is dropped.
CharMatrix encode_tweet(std::string_view text, const Alphabet& alphabet = Alphabet::standard(),
                        int max_chars = kMaxChars);

// Decoded value of one row: padding, the unknown slot, or an alphabet symbol.
struct DecodedChar {
  enum class Kind { pad, unknown, symbol } kind = Kind::pad;
  char symbol = '\0';

  bool operator==(const DecodedChar&) const = default;
};

// Throws Errc::malformed_row when more than one bit is set.
template <typename Derived>
DecodedChar decode_row(const Eigen::MatrixBase<Derived>& row,
                       const Alphabet& alphabet = Alphabet::standard());

}  // namespace ballot

#include "ballot/char_text_impl.hpp"
