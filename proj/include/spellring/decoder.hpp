#ifndef SPELLRING_DECODER_HPP
#define SPELLRING_DECODER_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spellring/ctc.hpp"
#include "spellring/matrix.hpp"

namespace spellring {

// Best-path decoding: per-frame argmax (lowest index on ties), collapse
// adjacent repeats, drop blanks. Symbols map to 'a' + index.
std::string greedy_decode(const Matrix& posterior, std::size_t blank);
std::string greedy_decode(const LetterPosterior& posterior);

struct BeamHyp {
  std::string text;
  double log_prob = 0.0;  // total probability summed over all alignments
};

// Prefix beam search. Each surviving prefix carries separate blank-ending
// and letter-ending masses, so its score is the exact sum over all of its
// alignments that the beam retained. Ranking and pruning order is
// (log_prob descending, text ascending); with beam_width >= the number of
// reachable prefixes the result is exact.
std::vector<BeamHyp> beam_decode(const Matrix& posterior, std::size_t blank,
                                 std::size_t beam_width, std::size_t top_k);
std::vector<BeamHyp> beam_decode(const LetterPosterior& posterior,
                                 std::size_t beam_width, std::size_t top_k);

}  // namespace spellring

#endif
