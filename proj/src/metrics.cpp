#include "spellring/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

std::vector<std::string> letters_of(const std::string& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (char c : s) out.emplace_back(1, c);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

EditOps edit_ops(const std::vector<std::string>& reference,
                 const std::vector<std::string>& hypothesis) {
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();

  // Full cost table so a backtrace can split the distance into S/D/I.
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return d[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub =
          at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      at(i, j) = std::min({at(i - 1, j) + 1, at(i, j - 1) + 1, sub});
    }

  EditOps ops;
  ops.reference_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) +
                        (reference[i - 1] == hypothesis[j - 1] ? 0 : 1)) {
      if (reference[i - 1] != hypothesis[j - 1]) ++ops.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions;
      --i;
    } else {
      ++ops.insertions;
      --j;
    }
  }
  return ops;
}

double ler(const std::string& reference, const std::string& hypothesis) {
  if (reference.empty())
    raise(ErrorKind::InvalidArgument, "ler: empty reference string");
  EditOps ops = edit_ops(letters_of(reference), letters_of(hypothesis));
  return double(ops.total()) / double(reference.size());
}

double wer(const std::vector<std::string>& reference,
           const std::vector<std::string>& hypothesis) {
  if (reference.empty())
    raise(ErrorKind::InvalidArgument, "wer: empty reference phrase");
  EditOps ops = edit_ops(reference, hypothesis);
  return double(ops.total()) / double(reference.size());
}

double top_n_accuracy(const std::vector<RankedItem>& items, std::size_t n) {
  if (n == 0)
    raise(ErrorKind::InvalidArgument, "top_n_accuracy: n must be at least 1");
  if (items.empty()) return 0.0;
  std::size_t hits = 0;
  for (const RankedItem& item : items) {
    std::size_t limit = std::min(n, item.candidates.size());
    for (std::size_t i = 0; i < limit; ++i)
      if (item.candidates[i] == item.truth) {
        ++hits;
        break;
      }
  }
  return double(hits) / double(items.size());
}

EvalReport aggregate_report(std::vector<EvalItem> items,
                            double words_per_minute) {
  EvalReport rep;
  rep.items = std::move(items);
  rep.words_per_minute = words_per_minute;
  if (rep.items.empty()) return rep;
  for (const EvalItem& it : rep.items) {
    rep.mean_ler += it.ler;
    rep.mean_wer += it.wer;
    for (int n = 0; n < 5; ++n)
      rep.top_n_accuracy[n] += it.top_n[n] ? 1.0 : 0.0;
  }
  double count = double(rep.items.size());
  rep.mean_ler /= count;
  rep.mean_wer /= count;
  for (int n = 0; n < 5; ++n) rep.top_n_accuracy[n] /= count;
  return rep;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "id\treference\thypothesis\tler\twer\ttop1\ttop2\ttop3\ttop4\ttop5\n";
  for (const EvalItem& it : report.items) {
    out += it.id + '\t' + it.reference + '\t' + it.hypothesis + '\t' +
           fmt(it.ler) + '\t' + fmt(it.wer);
    for (int n = 0; n < 5; ++n) out += it.top_n[n] ? "\t1" : "\t0";
    out += '\n';
  }
  out += "aggregate\titems=" + std::to_string(report.items.size()) +
         "\tler=" + fmt(report.mean_ler) + "\twer=" + fmt(report.mean_wer);
  for (int n = 0; n < 5; ++n)
    out += "\ttop" + std::to_string(n + 1) + "=" +
           fmt(report.top_n_accuracy[n]);
  out += "\twpm=" + fmt(report.words_per_minute) + "\n";
  return out;
}

EvalReport parse_report(const std::string& text) {
  std::vector<EvalItem> items;
  double wpm = 0.0;
  bool saw_footer = false;
  for (const std::string& line : split_lines(text)) {
    if (line.empty() || line.rfind("id\t", 0) == 0) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f[0] == "aggregate") {
      saw_footer = true;
      for (const std::string& kv : f)
        if (kv.rfind("wpm=", 0) == 0) wpm = std::stod(kv.substr(4));
      continue;
    }
    if (f.size() != 10)
      raise(ErrorKind::Format, "bad report record: " + line);
    EvalItem it;
    it.id = f[0];
    it.reference = f[1];
    it.hypothesis = f[2];
    it.ler = std::stod(f[3]);
    it.wer = std::stod(f[4]);
    for (int n = 0; n < 5; ++n) it.top_n[n] = f[5 + n] == "1";
    items.push_back(std::move(it));
  }
  if (!saw_footer)
    raise(ErrorKind::Format, "report has no aggregate footer");
  return aggregate_report(std::move(items), wpm);
}

}  // namespace spellring
