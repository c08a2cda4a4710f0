#include "spellring/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "spellring/alphabet.hpp"
#include "spellring/error.hpp"

namespace spellring {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Blank-ending and letter-ending mass of one prefix, log domain.
struct PrefixMass {
  double blank = kNegInf;
  double letter = kNegInf;

  double total() const { return log_add(blank, letter); }
};

}  // namespace

std::string greedy_decode(const Matrix& posterior, std::size_t blank) {
  if (blank >= posterior.cols())
    raise(ErrorKind::InvalidArgument, "greedy_decode: blank out of range");
  std::string out;
  std::size_t prev = blank;
  for (std::size_t t = 0; t < posterior.rows(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < posterior.cols(); ++k)
      if (posterior.at(t, k) > posterior.at(t, best)) best = k;
    if (best != blank && best != prev)
      out.push_back(static_cast<char>('a' + best));
    prev = best;
  }
  return out;
}

std::string greedy_decode(const LetterPosterior& posterior) {
  validate(posterior);
  return greedy_decode(posterior.probs, kBlank);
}

std::vector<BeamHyp> beam_decode(const Matrix& posterior, std::size_t blank,
                                 std::size_t beam_width, std::size_t top_k) {
  if (blank >= posterior.cols())
    raise(ErrorKind::InvalidArgument, "beam_decode: blank out of range");
  if (top_k < 1 || beam_width < top_k)
    raise(ErrorKind::InvalidArgument,
          "beam_decode: need beam_width >= top_k >= 1");

  // std::map keeps prefixes in lexicographic order, which makes the order
  // of mass accumulation (and therefore the output) deterministic.
  using Beam = std::map<std::string, PrefixMass>;
  Beam beam;
  beam[""] = {0.0, kNegInf};  // empty prefix: probability 1 of "ended blank"

  auto prune = [&](Beam& b) {
    if (b.size() <= beam_width) return;
    std::vector<std::pair<std::string, PrefixMass>> all(b.begin(), b.end());
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
      double tx = x.second.total(), ty = y.second.total();
      if (tx != ty) return tx > ty;
      return x.first < y.first;
    });
    b.clear();
    for (std::size_t i = 0; i < beam_width; ++i)
      b.insert(all[i]);
  };

  for (std::size_t t = 0; t < posterior.rows(); ++t) {
    Beam next;
    for (const auto& [prefix, mass] : beam) {
      double total = mass.total();

      // Emit blank: prefix unchanged, now blank-ending.
      {
        double add = total + safe_log(posterior.at(t, blank));
        PrefixMass& pm = next[prefix];
        pm.blank = log_add(pm.blank, add);
      }
      for (std::size_t k = 0; k < posterior.cols(); ++k) {
        if (k == blank) continue;
        double logy = safe_log(posterior.at(t, k));
        if (logy == kNegInf) continue;
        char c = static_cast<char>('a' + k);
        if (!prefix.empty() && prefix.back() == c) {
          // Repeated letter straight after itself collapses into the same
          // prefix; only a blank-separated repeat extends it.
          {
            PrefixMass& pm = next[prefix];
            pm.letter = log_add(pm.letter, mass.letter + logy);
          }
          {
            PrefixMass& pm = next[prefix + c];
            pm.letter = log_add(pm.letter, mass.blank + logy);
          }
        } else {
          PrefixMass& pm = next[prefix + c];
          pm.letter = log_add(pm.letter, total + logy);
        }
      }
    }
    prune(next);
    beam = std::move(next);
  }

  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [prefix, mass] : beam)
    ranked.push_back({prefix, mass.total()});
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });

  std::vector<BeamHyp> out;
  for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i)
    out.push_back({ranked[i].first, ranked[i].second});
  return out;
}

std::vector<BeamHyp> beam_decode(const LetterPosterior& posterior,
                                 std::size_t beam_width, std::size_t top_k) {
  validate(posterior);
  return beam_decode(posterior.probs, kBlank, beam_width, top_k);
}

}  // namespace spellring
