#ifndef SPELLRING_CORRECTOR_HPP
#define SPELLRING_CORRECTOR_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace spellring {

// Reference word list used for auto-correction. Words are lowercase a-z,
// deduplicated; frequency defaults to 1 when the file gives none.
struct DictEntry {
  std::string word;
  std::uint64_t frequency = 1;
};

struct Dictionary {
  std::vector<DictEntry> entries;
};

struct Candidate {
  std::string word;
  std::size_t distance = 0;
  double similarity = 0.0;  // 1 / (1 + distance)
};

// Throws on empty dictionaries, duplicates, or words outside [a-z]+.
void validate(const Dictionary& dict);

// Builds a dictionary from raw (word, frequency) rows, validating as above.
Dictionary make_dictionary(const std::vector<DictEntry>& entries);

// File format: one lowercase word per line, optional tab-separated frequency.
Dictionary load_dictionary(const std::string& path);
void save_dictionary(const Dictionary& dict, const std::string& path);

// Minimal substitutions + deletions + insertions turning a into b.
std::size_t levenshtein(const std::string& a, const std::string& b);

// The n dictionary words closest to raw, ranked by (distance ascending,
// frequency descending, lexicographic). Returns fewer than n when the
// dictionary is smaller.
std::vector<Candidate> correct(const std::string& raw, const Dictionary& dict,
                               std::size_t n);

}  // namespace spellring

#endif
