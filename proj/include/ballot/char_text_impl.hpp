#pragma once

#include "ballot/error.hpp"

namespace ballot {

template <typename Derived>
DecodedChar decode_row(const Eigen::MatrixBase<Derived>& row, const Alphabet& alphabet) {
  if (row.size() != alphabet.size())
    throw Error(Errc::shape, "decode_row: expected " + std::to_string(alphabet.size()) +
                                 " entries, got " + std::to_string(row.size()));
  int set_index = -1;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    const auto v = row.derived().reshaped()(i);
    if (v == 0) continue;
    if (v != 1 || set_index >= 0)
      throw Error(Errc::malformed_row, "decode_row: row is not one-hot");
    set_index = static_cast<int>(i);
  }
  if (set_index < 0) return {};
  if (set_index == Alphabet::kUnknown) return {DecodedChar::Kind::unknown, '\0'};
  return {DecodedChar::Kind::symbol, *alphabet.symbol(set_index)};
}

}  // namespace ballot
