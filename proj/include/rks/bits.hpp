#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rks {

// Basis words: bit j holds the spin on link j (1 means Sz = +1/2).
using Word = std::uint64_t;

inline int popcount(Word w) { return std::popcount(w); }

// Parity of the number of set bits, as 0/1.
inline int bit_parity(Word w) { return std::popcount(w) & 1; }

inline bool test_bit(Word w, int j) { return (w >> j) & 1u; }

inline Word set_bit(Word w, int j) { return w | (Word{1} << j); }

// Position of the highest set bit; -1 for the zero word.
inline int highest_bit(Word w) { return w == 0 ? -1 : 63 - std::countl_zero(w); }

// Fixed-width rendering, bit n-1 first down to bit 0.
inline std::string to_bitstring(Word w, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int j = 0; j < n; ++j) {
    if (test_bit(w, j)) s[static_cast<std::size_t>(n - 1 - j)] = '1';
  }
  return s;
}

inline Word parse_bitstring(const std::string& s) {
  if (s.empty() || s.size() > 64) {
    throw std::invalid_argument("bit string must have 1..64 characters");
  }
  Word w = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may contain only 0/1");
    w = (w << 1) | static_cast<Word>(c - '0');
  }
  return w;
}

}  // namespace rks
