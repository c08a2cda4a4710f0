#ifndef SPELLRING_LANG_MODEL_HPP
#define SPELLRING_LANG_MODEL_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "spellring/corrector.hpp"

namespace spellring {

// Sentence boundary markers. Contexts are padded with kBos; kEos only marks
// phrase ends inside the count tables.
inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";

// Stand-in for log(0) when a probability is exactly zero (k = 0 models).
// Finite so weighted sums stay NaN-free; large enough that any zero-
// probability path loses to every smoothed one.
inline constexpr double kLogProbFloor = -1e9;

// Add-k smoothed bigram/trigram statistics. N-gram keys are the tokens
// joined with single spaces (tokens never contain spaces).
struct NGramModel {
  std::unordered_map<std::string, std::uint64_t> unigram;      // word -> count
  std::unordered_map<std::string, std::uint64_t> bigram;       // "u w"
  std::unordered_map<std::string, std::uint64_t> bigram_ctx;   // "u"
  std::unordered_map<std::string, std::uint64_t> trigram;      // "u v w"
  std::unordered_map<std::string, std::uint64_t> trigram_ctx;  // "u v"
  std::vector<std::string> vocab;  // sorted distinct word types
  std::uint64_t total_words = 0;   // word events across the corpus
  double k = 1.0;

  std::size_t vocab_size() const { return vocab.size(); }
};

// Counts n-grams over the corpus with every phrase padded as
// [<s>, <s>, w1..wn, </s>]. Context counts only include events whose
// successor is a real word, so each context's smoothed row sums to one
// over the vocabulary.
NGramModel fit_ngram(const std::vector<std::vector<std::string>>& phrases,
                     double k);

// Plain add-k conditionals with no backoff (used directly by tests and by
// the backoff chain below).
double prob_unigram(const NGramModel& model, const std::string& w);
double prob_bigram(const NGramModel& model, const std::string& prev,
                   const std::string& w);
double prob_trigram(const NGramModel& model, const std::string& prev2,
                    const std::string& prev1, const std::string& w);

// P(w | prev2, prev1) backing off trigram -> bigram -> unigram whenever the
// longer context was never observed.
double cond_prob(const NGramModel& model, const std::string& prev2,
                 const std::string& prev1, const std::string& w);

// Sum of log conditional probabilities with <s>-padded context. No
// end-marker term, so appending a word never raises the total.
double score_sequence(const NGramModel& model,
                      const std::vector<std::string>& words);

// Per word position, the recognizer's ranked candidates.
struct PhraseLattice {
  std::vector<std::vector<Candidate>> positions;
};

void validate(const PhraseLattice& lattice);

// Exact DP over candidate-pair contexts maximizing
//   sum_i [ alpha * log P(w_i | w_{i-2}, w_{i-1}) + (1-alpha) * log sim_i ].
// Ties resolve to the earlier candidate at each position (candidates are
// ordered by similarity, then lexicographically).
std::vector<std::string> rescore_lattice(const NGramModel& model,
                                         const PhraseLattice& lattice,
                                         double alpha);

// Phrase corpus file: one lowercase space-separated phrase per line.
std::vector<std::vector<std::string>> load_phrases(const std::string& path);

}  // namespace spellring

#endif
