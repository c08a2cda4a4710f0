#ifndef SPELLRING_METRICS_HPP
#define SPELLRING_METRICS_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace spellring {

// Minimal-edit decomposition of hypothesis vs reference.
struct EditOps {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;   // tokens of the reference missing from hyp
  std::size_t insertions = 0;  // extra tokens in hyp
  std::size_t reference_length = 0;

  std::size_t total() const {
    return substitutions + deletions + insertions;
  }
};

// Shared DP used by both letter- and word-level rates.
EditOps edit_ops(const std::vector<std::string>& reference,
                 const std::vector<std::string>& hypothesis);

// Letter error rate: minimal (S+D+I) / reference length. Letters, i.e. the
// raw decoded string before word correction.
double ler(const std::string& reference, const std::string& hypothesis);

// Word error rate over token sequences; may exceed 1 when insertions
// dominate (reported unclipped).
double wer(const std::vector<std::string>& reference,
           const std::vector<std::string>& hypothesis);

// One scored word: the truth plus a ranked candidate list.
struct RankedItem {
  std::string truth;
  std::vector<std::string> candidates;  // best first
};

// Fraction of items whose truth appears within the first n candidates.
double top_n_accuracy(const std::vector<RankedItem>& items, std::size_t n);

// Per-item record of an evaluation run.
struct EvalItem {
  std::string id;
  std::string reference;
  std::string hypothesis;
  double ler = 0.0;
  double wer = 0.0;
  std::array<bool, 5> top_n{};  // truth within the first 1..5 candidates
};

struct EvalReport {
  std::vector<EvalItem> items;
  double mean_ler = 0.0;
  double mean_wer = 0.0;
  std::array<double, 5> top_n_accuracy{};
  double words_per_minute = 0.0;
};

// Fills the aggregate fields as plain means of the per-item values; wpm is
// supplied by the caller (word count over elapsed minutes from the session
// manifest).
EvalReport aggregate_report(std::vector<EvalItem> items,
                            double words_per_minute);

// Structured-text round trip: one tab-separated record per item plus an
// aggregate footer.
std::string format_report(const EvalReport& report);
EvalReport parse_report(const std::string& text);

}  // namespace spellring

#endif
