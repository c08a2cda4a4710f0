#include "spellring/ctc.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spellring/alphabet.hpp"
#include "spellring/error.hpp"

namespace spellring {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

void validate(const LetterPosterior& posterior) {
  if (posterior.probs.cols() != kAlphabetSize)
    raise(ErrorKind::InvalidArgument,
          "posterior must have 27 columns, got " +
              std::to_string(posterior.probs.cols()));
  for (std::size_t t = 0; t < posterior.probs.rows(); ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < posterior.probs.cols(); ++k) {
      double v = posterior.probs.at(t, k);
      if (!(v >= 0.0) || !std::isfinite(v))
        raise(ErrorKind::Numeric, "posterior has a negative or non-finite "
                                  "entry at frame " + std::to_string(t));
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-6)
      raise(ErrorKind::Numeric, "posterior row " + std::to_string(t) +
                                    " sums to " + std::to_string(sum));
  }
}

std::size_t ctc_min_frames(const std::vector<std::size_t>& label) {
  std::size_t frames = label.size();
  for (std::size_t i = 1; i < label.size(); ++i)
    if (label[i] == label[i - 1]) ++frames;
  return frames;
}

CtcTrellis ctc_forward_backward(const Matrix& posterior,
                                const std::vector<std::size_t>& label,
                                std::size_t blank) {
  const std::size_t T = posterior.rows();
  const std::size_t W = posterior.cols();
  if (blank >= W)
    raise(ErrorKind::InvalidArgument, "ctc: blank index out of range");
  if (label.empty())
    raise(ErrorKind::InvalidArgument, "ctc: empty label");
  for (std::size_t s : label)
    if (s >= W || s == blank)
      raise(ErrorKind::InvalidArgument,
            "ctc: label symbol " + std::to_string(s) + " invalid for width " +
                std::to_string(W));
  std::size_t need = ctc_min_frames(label);
  if (T < need)
    raise(ErrorKind::InfeasibleAlignment,
          "ctc: label needs at least " + std::to_string(need) +
              " frames but the posterior has " + std::to_string(T));

  // Extended label: blanks interleaved around every letter.
  const std::size_t L = label.size();
  const std::size_t S = 2 * L + 1;
  std::vector<std::size_t> ext(S, blank);
  for (std::size_t i = 0; i < L; ++i) ext[2 * i + 1] = label[i];

  auto logy = [&](std::size_t t, std::size_t s) {
    return safe_log(posterior.at(t, ext[s]));
  };
  // A skip transition s-2 -> s is allowed when s is a letter differing from
  // the previous letter (no blank needed between them).
  auto can_skip = [&](std::size_t s) {
    return ext[s] != blank && s >= 2 && ext[s] != ext[s - 2];
  };

  CtcTrellis tr;
  tr.alpha = Matrix(T, S, kNegInf);
  tr.beta = Matrix(T, S, kNegInf);

  tr.alpha.at(0, 0) = logy(0, 0);
  if (S > 1) tr.alpha.at(0, 1) = logy(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = tr.alpha.at(t - 1, s);
      if (s >= 1) a = log_add(a, tr.alpha.at(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, tr.alpha.at(t - 1, s - 2));
      tr.alpha.at(t, s) = a + logy(t, s);
    }
  }

  tr.beta.at(T - 1, S - 1) = logy(T - 1, S - 1);
  if (S > 1) tr.beta.at(T - 1, S - 2) = logy(T - 1, S - 2);
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double b = tr.beta.at(t + 1, s);
      if (s + 1 < S) b = log_add(b, tr.beta.at(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = log_add(b, tr.beta.at(t + 1, s + 2));
      tr.beta.at(t, s) = b + logy(t, s);
    }
  }

  double log_p = log_add(tr.alpha.at(T - 1, S - 1),
                         S > 1 ? tr.alpha.at(T - 1, S - 2) : kNegInf);
  if (log_p == kNegInf)
    raise(ErrorKind::Numeric,
          "ctc: label has zero probability under this posterior");
  tr.loss = -log_p;

  // Occupancy gamma(t, k): posterior mass of paths emitting symbol k at t.
  // alpha*beta double-counts the frame emission, hence the -logy term.
  tr.grad_logits = Matrix(T, W);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> log_gamma(W, kNegInf);
    for (std::size_t s = 0; s < S; ++s) {
      double ab = tr.alpha.at(t, s) + tr.beta.at(t, s);
      if (ab == kNegInf) continue;
      log_gamma[ext[s]] = log_add(log_gamma[ext[s]], ab - logy(t, s));
    }
    for (std::size_t k = 0; k < W; ++k) {
      double gamma =
          log_gamma[k] == kNegInf ? 0.0 : std::exp(log_gamma[k] - log_p);
      tr.grad_logits.at(t, k) = posterior.at(t, k) - gamma;
    }
  }
  return tr;
}

CtcTrellis ctc_forward_backward(const LetterPosterior& posterior,
                                const std::string& label) {
  validate(posterior);
  return ctc_forward_backward(posterior.probs, label_indices(label), kBlank);
}

}  // namespace spellring
