#include "spellring/corrector.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

bool is_lower_word(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c < 'a' || c > 'z') return false;
  return true;
}

}  // namespace

void validate(const Dictionary& dict) {
  if (dict.entries.empty())
    raise(ErrorKind::Data, "dictionary is empty");
  std::unordered_set<std::string> seen;
  for (const DictEntry& e : dict.entries) {
    if (!is_lower_word(e.word))
      raise(ErrorKind::Data,
            "dictionary word is not lowercase a-z: '" + e.word + "'");
    if (!seen.insert(e.word).second)
      raise(ErrorKind::Data, "duplicate dictionary word: '" + e.word + "'");
  }
}

Dictionary make_dictionary(const std::vector<DictEntry>& entries) {
  Dictionary d{entries};
  validate(d);
  return d;
}

Dictionary load_dictionary(const std::string& path) {
  Dictionary d;
  for (const std::string& line : split_lines(read_text_file(path))) {
    if (line.empty()) continue;
    DictEntry e;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      e.word = line;
    } else {
      e.word = line.substr(0, tab);
      try {
        e.frequency = std::stoull(line.substr(tab + 1));
      } catch (const std::exception&) {
        raise(ErrorKind::Format,
              "bad frequency field in dictionary " + path + ": " + line);
      }
    }
    d.entries.push_back(std::move(e));
  }
  validate(d);
  return d;
}

void save_dictionary(const Dictionary& dict, const std::string& path) {
  std::string out;
  for (const DictEntry& e : dict.entries) {
    out += e.word;
    out += '\t';
    out += std::to_string(e.frequency);
    out += '\n';
  }
  write_text_file(path, out);
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  // Two-row DP; distances are small (word-length) so size_t rows are cheap.
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<Candidate> correct(const std::string& raw, const Dictionary& dict,
                               std::size_t n) {
  if (n == 0)
    raise(ErrorKind::InvalidArgument, "correct: n must be at least 1");
  validate(dict);

  struct Scored {
    const DictEntry* entry;
    std::size_t distance;
  };
  std::vector<Scored> scored;
  scored.reserve(dict.entries.size());
  for (const DictEntry& e : dict.entries)
    scored.push_back({&e, levenshtein(raw, e.word)});

  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& x, const Scored& y) {
                     if (x.distance != y.distance) return x.distance < y.distance;
                     if (x.entry->frequency != y.entry->frequency)
                       return x.entry->frequency > y.entry->frequency;
                     return x.entry->word < y.entry->word;
                   });

  std::vector<Candidate> out;
  for (const Scored& s : scored) {
    if (out.size() == n) break;
    out.push_back({s.entry->word, s.distance,
                   1.0 / (1.0 + double(s.distance))});
  }
  return out;
}

}  // namespace spellring
