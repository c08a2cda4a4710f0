#include "spellring/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "spellring/alphabet.hpp"
#include "spellring/decoder.hpp"
#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

struct LoadedItem {
  ManifestItem meta;
  std::string session;
};

std::vector<LoadedItem> list_corpus_items(const std::string& root) {
  std::vector<LoadedItem> items;
  for (const SessionRef& ref :
       read_corpus_index(join_path(root, "corpus.tsv"))) {
    for (const ManifestItem& item :
         read_manifest(join_path(root, ref.manifest_path)))
      items.push_back(LoadedItem{item, ref.id});
  }
  if (items.empty()) raise(ErrorKind::Data, root + ": corpus has no items");
  return items;
}

// Words per minute from manifest timestamps: each session contributes its
// item count over the span between its first and last start times.
double corpus_wpm(const std::vector<LoadedItem>& items) {
  double minutes = 0.0;
  std::size_t words = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].session == items[i].session) ++j;
    if (j - i >= 2) {
      const double span =
          items[j - 1].meta.start_time - items[i].meta.start_time;
      if (span > 0.0) {
        minutes += span / 60.0;
        words += j - i - 1;
      }
    }
    i = j;
  }
  return minutes > 0.0 ? static_cast<double>(words) / minutes : 0.0;
}

// Features -> posterior -> beam: the raw letter hypothesis for one item.
std::string decode_raw(const std::string& root, const ManifestItem& item,
                       const ModelParams& params, const PipelineConfig& cfg) {
  FusedWindow window = load_item_features(root, item, cfg.features);
  LetterPosterior posterior = forward(params, window);
  std::vector<BeamHyp> beam =
      beam_decode(posterior, cfg.beam_width, /*top_k=*/1);
  return beam.empty() ? std::string() : beam.front().text;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  validate(cfg.features);
  validate(cfg.train);
  if (cfg.top_n == 0)
    raise(ErrorKind::Config, "pipeline: top_n must be positive");
  if (cfg.beam_width == 0)
    raise(ErrorKind::Config, "pipeline: beam_width must be positive");
  if (!(cfg.lm_alpha >= 0.0 && cfg.lm_alpha <= 1.0))
    raise(ErrorKind::Config, "pipeline: lm_alpha must be in [0, 1]");
  if (!(cfg.lm_k >= 0.0))
    raise(ErrorKind::Config, "pipeline: lm_k must be non-negative");
}

std::vector<TrainSession> load_training_sessions(const std::string& root,
                                                 const FeatureConfig& cfg) {
  std::vector<TrainSession> sessions;
  for (const SessionRef& ref :
       read_corpus_index(join_path(root, "corpus.tsv"))) {
    TrainSession session;
    session.id = ref.id;
    for (const ManifestItem& item :
         read_manifest(join_path(root, ref.manifest_path))) {
      TrainItem ti;
      ti.id = item.id;
      ti.label = item.word;
      ti.window = load_item_features(root, item, cfg);
      session.items.push_back(std::move(ti));
    }
    sessions.push_back(std::move(session));
  }
  return sessions;
}

TrainResult train_pipeline(const std::string& root,
                           const PipelineConfig& cfg) {
  validate(cfg);
  return train(load_training_sessions(root, cfg.features), cfg.train);
}

EvalReport eval_words(const std::string& root, const ModelParams& params,
                      const Dictionary& dict, const PipelineConfig& cfg) {
  validate(cfg);
  validate(dict);
  const std::vector<LoadedItem> corpus = list_corpus_items(root);
  std::vector<EvalItem> items;
  for (const LoadedItem& li : corpus) {
    EvalItem ev;
    ev.id = li.meta.id;
    ev.reference = li.meta.word;
    try {
      const std::string raw = decode_raw(root, li.meta, params, cfg);
      ev.ler = ler(li.meta.word, raw);
      const std::vector<Candidate> cands = correct(raw, dict, cfg.top_n);
      ev.hypothesis = cands.front().word;
      for (std::size_t n = 0; n < ev.top_n.size(); ++n)
        for (std::size_t c = 0; c < std::min<std::size_t>(n + 1, cands.size());
             ++c)
          if (cands[c].word == li.meta.word) ev.top_n[n] = true;
    } catch (const Error&) {
      // Unreadable or unusable item: full-error placeholder, run continues.
      ev.hypothesis.clear();
      ev.ler = 1.0;
    }
    ev.wer = wer({ev.reference}, ev.hypothesis.empty()
                                     ? std::vector<std::string>{}
                                     : std::vector<std::string>{ev.hypothesis});
    items.push_back(ev);
  }
  return aggregate_report(std::move(items), corpus_wpm(corpus));
}

void gen_phrase_corpus(const LetterBank& bank,
                       const std::vector<std::vector<std::string>>& phrases,
                       const SynthConfig& synth, const std::string& root) {
  if (phrases.empty())
    raise(ErrorKind::Data, "gen_phrase_corpus: no phrases given");
  validate(bank);
  validate(synth);
  ensure_directory(root);
  ensure_directory(join_path(root, "session_00"));

  Rng root_rng(synth.seed);
  std::vector<ManifestItem> items;
  std::string phrase_text;
  double clock = 0.0;
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    if (phrases[p].empty())
      raise(ErrorKind::Data, "gen_phrase_corpus: empty phrase");
    Rng prng = root_rng.substream(0x70000000ull + p);
    SynthConfig wcfg = synth;
    wcfg.letters_per_second =
        synth.letters_per_second *
        (1.0 + synth.speed_jitter * prng.uniform(-1.0, 1.0));
    for (std::size_t w = 0; w < phrases[p].size(); ++w) {
      Rng irng = root_rng.substream(((p + 1) << 24) |
                                    static_cast<std::uint64_t>(w));
      SynthResult synth_out =
          synthesize_word(bank, phrases[p][w], wcfg, irng);
      char stem[64];
      std::snprintf(stem, sizeof(stem), "session_00/p%03zu_w%02zu", p, w);
      ManifestItem item;
      item.id = std::string("p") + std::to_string(p) + "_w" +
                std::to_string(w);
      item.word = phrases[p][w];
      item.audio_path = std::string(stem) + ".f32";
      item.gyro_path = std::string(stem) + ".gyro";
      item.start_time = clock;
      item.letters_per_second = wcfg.letters_per_second;
      write_audio(join_path(root, item.audio_path), synth_out.audio.samples);
      write_gyro(join_path(root, item.gyro_path), synth_out.gyro.samples);
      items.push_back(item);
      clock += static_cast<double>(synth_out.audio.samples.size()) /
                   synth.chirp.sample_rate +
               0.6;
    }
    phrase_text += join_words(phrases[p]) + "\n";
  }
  write_manifest(join_path(root, "session_00/manifest.tsv"), items);
  write_corpus_index(join_path(root, "corpus.tsv"),
                     {{"session_00", "session_00/manifest.tsv"}});
  write_text_file(join_path(root, "phrases.txt"), phrase_text);
}

PhraseEvalResult eval_phrases(const std::string& root,
                              const ModelParams& params,
                              const Dictionary& dict, const NGramModel& lm,
                              const PipelineConfig& cfg) {
  validate(cfg);
  validate(dict);
  const std::vector<std::vector<std::string>> phrases =
      load_phrases(join_path(root, "phrases.txt"));
  const std::vector<LoadedItem> corpus = list_corpus_items(root);

  std::vector<EvalItem> rescored_items, baseline_items;
  std::size_t cursor = 0;
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    const std::vector<std::string>& truth = phrases[p];
    if (cursor + truth.size() > corpus.size())
      raise(ErrorKind::Data,
            root + ": corpus items run out before phrase " +
                std::to_string(p));

    PhraseLattice lattice;
    std::vector<std::string> baseline_words;
    std::vector<std::string> streamed;
    for (std::size_t w = 0; w < truth.size(); ++w) {
      const LoadedItem& li = corpus[cursor++];
      if (li.meta.word != truth[w])
        raise(ErrorKind::Data,
              root + ": manifest word '" + li.meta.word +
                  "' does not match phrase word '" + truth[w] + "'");
      std::string raw;
      try {
        raw = decode_raw(root, li.meta, params, cfg);
      } catch (const Error&) {
        raw.clear();
      }
      lattice.positions.push_back(correct(raw, dict, cfg.top_n));
      baseline_words.push_back(lattice.positions.back().front().word);
      // Streaming pass: rescore after every appended word.
      streamed = rescore_lattice(lm, lattice, cfg.lm_alpha);
    }
    const std::vector<std::string> batch =
        rescore_lattice(lm, lattice, cfg.lm_alpha);
    if (batch != streamed)
      raise(ErrorKind::Numeric,
            "eval_phrases: streaming and batch rescoring disagree on phrase " +
                std::to_string(p));

    const std::string ref_text = join_words(truth);
    EvalItem re;
    re.id = "phrase_" + std::to_string(p);
    re.reference = ref_text;
    re.hypothesis = join_words(batch);
    re.ler = ler(ref_text, re.hypothesis);
    re.wer = wer(truth, batch);
    re.top_n.fill(re.hypothesis == ref_text);
    rescored_items.push_back(re);

    EvalItem base = re;
    base.hypothesis = join_words(baseline_words);
    base.ler = ler(ref_text, base.hypothesis);
    base.wer = wer(truth, baseline_words);
    base.top_n.fill(base.hypothesis == ref_text);
    baseline_items.push_back(base);
  }

  const double wpm = corpus_wpm(corpus);
  PhraseEvalResult result;
  result.rescored = aggregate_report(std::move(rescored_items), wpm);
  result.baseline = aggregate_report(std::move(baseline_items), wpm);
  return result;
}

DecodeResult decode_item(const std::string& root, const std::string& item_id,
                         const ModelParams& params, const Dictionary& dict,
                         const PipelineConfig& cfg) {
  validate(cfg);
  validate(dict);
  for (const LoadedItem& li : list_corpus_items(root)) {
    if (li.meta.id != item_id) continue;
    DecodeResult out;
    out.item_id = item_id;
    out.truth = li.meta.word;
    out.raw = decode_raw(root, li.meta, params, cfg);
    out.candidates = correct(out.raw, dict, cfg.top_n);
    return out;
  }
  raise(ErrorKind::Data, root + ": no item with id '" + item_id + "'");
}

}  // namespace spellring
