#ifndef SPELLRING_CTC_HPP
#define SPELLRING_CTC_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spellring/matrix.hpp"

namespace spellring {

// Per-frame distribution over the 26 letters + blank; rows sum to 1.
struct LetterPosterior {
  Matrix probs;  // [T x 27]
};

void validate(const LetterPosterior& posterior);

// Forward-backward state for one (posterior, label) pair. alpha and beta
// follow the usual convention where both include the emission at their own
// frame, so exp(logsumexp of the terminal alphas) = p(label) = exp(-loss)
// and the same holds for the initial betas.
struct CtcTrellis {
  Matrix alpha;        // [T x (2L+1)], log domain
  Matrix beta;         // [T x (2L+1)], log domain
  double loss = 0.0;   // -log p(label | posterior), nats
  Matrix grad_logits;  // [T x W]: posterior minus per-frame symbol occupancy
};

// Shortest frame count that can emit the label: its length plus one
// mandatory separating blank per adjacent repeated letter.
std::size_t ctc_min_frames(const std::vector<std::size_t>& label);

// Log-domain CTC over a generic symbol set of width posterior.cols() with
// the given blank index. Labels hold symbol indices excluding the blank.
CtcTrellis ctc_forward_backward(const Matrix& posterior,
                                const std::vector<std::size_t>& label,
                                std::size_t blank);

// Letter-string wrapper over the a-z + blank alphabet.
CtcTrellis ctc_forward_backward(const LetterPosterior& posterior,
                                const std::string& label);

// log(exp(a) + exp(b)) tolerant of -inf inputs.
double log_add(double a, double b);

}  // namespace spellring

#endif
