#ifndef SPELLRING_ALPHABET_HPP
#define SPELLRING_ALPHABET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spellring/error.hpp"

namespace spellring {

// Output symbols: the 26 lowercase letters a-z at indices 0..25 and the CTC
// blank at index 26. The blank never appears in a label.
inline constexpr std::size_t kAlphabetSize = 27;
inline constexpr std::size_t kBlank = 26;

inline std::size_t letter_index(char c) {
  if (c < 'a' || c > 'z')
    raise(ErrorKind::InvalidArgument,
          std::string("letter outside a-z: '") + c + "'");
  return static_cast<std::size_t>(c - 'a');
}

inline char index_letter(std::size_t i) {
  if (i >= 26)
    raise(ErrorKind::InvalidArgument,
          "symbol index " + std::to_string(i) + " is not a letter");
  return static_cast<char>('a' + i);
}

inline std::vector<std::size_t> label_indices(const std::string& label) {
  std::vector<std::size_t> out;
  out.reserve(label.size());
  for (char c : label) out.push_back(letter_index(c));
  return out;
}

}  // namespace spellring

#endif
