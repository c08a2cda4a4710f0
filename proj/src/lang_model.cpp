#include "spellring/lang_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

bool is_token(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c < 'a' || c > 'z') return false;
  return true;
}

void check_tokens(const std::vector<std::string>& words, const char* who) {
  for (const std::string& w : words)
    if (!is_token(w))
      raise(ErrorKind::InvalidArgument,
            std::string(who) + ": token is not lowercase a-z: '" + w + "'");
}

std::uint64_t count_of(const std::unordered_map<std::string, std::uint64_t>& m,
                       const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

double add_k(std::uint64_t event, std::uint64_t context, double k,
             std::size_t vocab) {
  double denom = double(context) + k * double(vocab);
  if (denom <= 0.0) return 0.0;  // k = 0 and unseen context
  return (double(event) + k) / denom;
}

}  // namespace

NGramModel fit_ngram(const std::vector<std::vector<std::string>>& phrases,
                     double k) {
  if (phrases.empty())
    raise(ErrorKind::Data, "fit_ngram: empty phrase corpus");
  if (k < 0.0)
    raise(ErrorKind::InvalidArgument, "fit_ngram: smoothing k must be >= 0");

  NGramModel model;
  model.k = k;
  std::set<std::string> vocab;

  for (const std::vector<std::string>& phrase : phrases) {
    if (phrase.empty())
      raise(ErrorKind::Data, "fit_ngram: corpus contains an empty phrase");
    check_tokens(phrase, "fit_ngram");

    std::vector<std::string> padded;
    padded.reserve(phrase.size() + 3);
    padded.push_back(kBos);
    padded.push_back(kBos);
    padded.insert(padded.end(), phrase.begin(), phrase.end());
    padded.push_back(kEos);

    for (const std::string& w : phrase) {
      ++model.unigram[w];
      ++model.total_words;
      vocab.insert(w);
    }
    // Context counts take only events whose successor is a real word; the
    // add-k row over the vocabulary then sums to exactly one.
    for (std::size_t i = 0; i + 1 < padded.size(); ++i) {
      const std::string& next = padded[i + 1];
      if (next == kEos) continue;
      if (next == kBos) continue;  // the (<s>, <s>) pair at the front
      ++model.bigram[padded[i] + " " + next];
      ++model.bigram_ctx[padded[i]];
      if (i + 2 < padded.size() && padded[i + 2] != kEos) {
        ++model.trigram[padded[i] + " " + next + " " + padded[i + 2]];
        ++model.trigram_ctx[padded[i] + " " + next];
      }
    }
  }
  model.vocab.assign(vocab.begin(), vocab.end());
  return model;
}

double prob_unigram(const NGramModel& model, const std::string& w) {
  return add_k(count_of(model.unigram, w), model.total_words, model.k,
               model.vocab_size());
}

double prob_bigram(const NGramModel& model, const std::string& prev,
                   const std::string& w) {
  return add_k(count_of(model.bigram, prev + " " + w),
               count_of(model.bigram_ctx, prev), model.k, model.vocab_size());
}

double prob_trigram(const NGramModel& model, const std::string& prev2,
                    const std::string& prev1, const std::string& w) {
  return add_k(count_of(model.trigram, prev2 + " " + prev1 + " " + w),
               count_of(model.trigram_ctx, prev2 + " " + prev1), model.k,
               model.vocab_size());
}

double cond_prob(const NGramModel& model, const std::string& prev2,
                 const std::string& prev1, const std::string& w) {
  if (count_of(model.trigram_ctx, prev2 + " " + prev1) > 0)
    return prob_trigram(model, prev2, prev1, w);
  if (count_of(model.bigram_ctx, prev1) > 0)
    return prob_bigram(model, prev1, w);
  return prob_unigram(model, w);
}

double score_sequence(const NGramModel& model,
                      const std::vector<std::string>& words) {
  check_tokens(words, "score_sequence");
  double total = 0.0;
  std::string prev2 = kBos, prev1 = kBos;
  for (const std::string& w : words) {
    double p = cond_prob(model, prev2, prev1, w);
    total += p <= 0.0 ? kLogProbFloor : std::log(p);
    prev2 = prev1;
    prev1 = w;
  }
  return total;
}

void validate(const PhraseLattice& lattice) {
  if (lattice.positions.empty())
    raise(ErrorKind::Data, "lattice has no word positions");
  for (std::size_t i = 0; i < lattice.positions.size(); ++i) {
    const auto& cands = lattice.positions[i];
    if (cands.empty())
      raise(ErrorKind::Data,
            "lattice position " + std::to_string(i) + " has no candidates");
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (!(cands[c].similarity > 0.0) || cands[c].similarity > 1.0)
        raise(ErrorKind::Data, "lattice similarity out of (0, 1] at position " +
                                   std::to_string(i));
      if (c > 0 && cands[c].similarity > cands[c - 1].similarity)
        raise(ErrorKind::Data,
              "lattice candidates not sorted by similarity at position " +
                  std::to_string(i));
    }
  }
}

std::vector<std::string> rescore_lattice(const NGramModel& model,
                                         const PhraseLattice& lattice,
                                         double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    raise(ErrorKind::InvalidArgument, "rescore_lattice: alpha must be in [0,1]");
  validate(lattice);

  const std::size_t P = lattice.positions.size();

  // DP runs over a per-position ordering by (similarity desc, word asc);
  // "earliest index wins ties" then realizes the documented tie-break.
  std::vector<std::vector<std::size_t>> order(P);
  for (std::size_t pos = 0; pos < P; ++pos) {
    const auto& cands = lattice.positions[pos];
    order[pos].resize(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) order[pos][i] = i;
    std::stable_sort(order[pos].begin(), order[pos].end(),
                     [&](std::size_t a, std::size_t b) {
                       if (cands[a].similarity != cands[b].similarity)
                         return cands[a].similarity > cands[b].similarity;
                       return cands[a].word < cands[b].word;
                     });
  }
  auto cand_at = [&](std::size_t pos, std::size_t idx) -> const Candidate& {
    return lattice.positions[pos][order[pos][idx]];
  };
  auto word_at = [&](std::size_t pos, std::size_t idx) -> const std::string& {
    return cand_at(pos, idx).word;
  };
  auto local = [&](std::size_t pos, std::size_t idx, const std::string& p2,
                   const std::string& p1) {
    const Candidate& c = cand_at(pos, idx);
    double lm = cond_prob(model, p2, p1, c.word);
    double lm_term = alpha == 0.0
                         ? 0.0
                         : alpha * (lm <= 0.0 ? kLogProbFloor : std::log(lm));
    return lm_term + (1.0 - alpha) * std::log(c.similarity);
  };

  // State after filling position i: the candidate indices at (i-1, i);
  // position 0 uses a single virtual predecessor (index 0, word <s>).
  struct Cell {
    double score;
    std::size_t back;  // predecessor's own predecessor index
  };
  std::size_t prev_count = 1;
  std::vector<std::vector<Cell>> dp(P);

  dp[0].resize(lattice.positions[0].size() * prev_count);
  for (std::size_t c = 0; c < lattice.positions[0].size(); ++c)
    dp[0][c] = {local(0, c, kBos, kBos), 0};

  for (std::size_t pos = 1; pos < P; ++pos) {
    std::size_t prev_n = lattice.positions[pos - 1].size();
    std::size_t prev_prev_n = pos >= 2 ? lattice.positions[pos - 2].size() : 1;
    std::size_t cur_n = lattice.positions[pos].size();
    dp[pos].assign(cur_n * prev_n, Cell{0.0, 0});

    for (std::size_t cur = 0; cur < cur_n; ++cur) {
      for (std::size_t prev = 0; prev < prev_n; ++prev) {
        const std::string& p1 = word_at(pos - 1, prev);
        bool have = false;
        Cell best{0.0, 0};
        for (std::size_t pp = 0; pp < prev_prev_n; ++pp) {
          const std::string& p2 = pos >= 2 ? word_at(pos - 2, pp) : kBos;
          double score = dp[pos - 1][prev * prev_prev_n + pp].score +
                         local(pos, cur, p2, p1);
          // Strict > keeps the earliest (highest-similarity) predecessor
          // on ties.
          if (!have || score > best.score) {
            have = true;
            best = {score, pp};
          }
        }
        dp[pos][cur * prev_n + prev] = best;
      }
    }
    prev_count = prev_n;
  }

  // Pick the best terminal state; earliest indices win ties.
  std::size_t last_n = lattice.positions[P - 1].size();
  std::size_t before_n = P >= 2 ? lattice.positions[P - 2].size() : 1;
  std::size_t best_cur = 0, best_prev = 0;
  double best_score = 0.0;
  bool have = false;
  for (std::size_t cur = 0; cur < last_n; ++cur)
    for (std::size_t prev = 0; prev < before_n; ++prev) {
      double s = dp[P - 1][cur * before_n + prev].score;
      if (!have || s > best_score) {
        have = true;
        best_score = s;
        best_cur = cur;
        best_prev = prev;
      }
    }

  // Backtrace.
  std::vector<std::size_t> picks(P);
  picks[P - 1] = best_cur;
  std::size_t cur = best_cur, prev = best_prev;
  for (std::size_t pos = P - 1; pos > 0; --pos) {
    std::size_t pp = dp[pos][cur * lattice.positions[pos - 1].size() + prev].back;
    picks[pos - 1] = prev;
    cur = prev;
    prev = pp;
  }

  std::vector<std::string> out(P);
  for (std::size_t i = 0; i < P; ++i) out[i] = word_at(i, picks[i]);
  return out;
}

std::vector<std::vector<std::string>> load_phrases(const std::string& path) {
  std::vector<std::vector<std::string>> phrases;
  for (const std::string& line : split_lines(read_text_file(path))) {
    if (line.empty()) continue;
    std::vector<std::string> words = split_whitespace(line);
    check_tokens(words, ("load_phrases(" + path + ")").c_str());
    phrases.push_back(std::move(words));
  }
  if (phrases.empty())
    raise(ErrorKind::Data, "phrase file is empty: " + path);
  return phrases;
}

}  // namespace spellring
