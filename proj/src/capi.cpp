#include "spellring.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "spellring/checkpoint.hpp"
#include "spellring/corrector.hpp"
#include "spellring/error.hpp"
#include "spellring/io.hpp"
#include "spellring/lang_model.hpp"
#include "spellring/manifest.hpp"
#include "spellring/metrics.hpp"
#include "spellring/pipeline.hpp"
#include "spellring/settings.hpp"

using namespace spellring;

extern "C" {
struct sr_dictionary {
  Dictionary dict;
};
struct sr_ngram {
  NGramModel lm;
};
struct sr_model {
  ModelParams params;
};
}

namespace {

thread_local std::string g_last_error;

sr_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return SR_ERR_INVALID_ARGUMENT;
    case ErrorKind::Config:
      return SR_ERR_CONFIG;
    case ErrorKind::Format:
      return SR_ERR_FORMAT;
    case ErrorKind::InsufficientData:
      return SR_ERR_INSUFFICIENT_DATA;
    case ErrorKind::Alignment:
      return SR_ERR_ALIGNMENT;
    case ErrorKind::InfeasibleAlignment:
      return SR_ERR_INFEASIBLE_ALIGNMENT;
    case ErrorKind::Numeric:
      return SR_ERR_NUMERIC;
    case ErrorKind::Data:
      return SR_ERR_DATA;
    case ErrorKind::Io:
      return SR_ERR_IO;
  }
  return SR_ERR_UNKNOWN;
}

template <typename F>
sr_status wrap(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SR_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return SR_ERR_UNKNOWN;
  }
}

void require_arg(const void* p, const char* name) {
  if (p == nullptr)
    raise(ErrorKind::InvalidArgument,
          std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) raise(ErrorKind::Io, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_words(const char* text) {
  return split_whitespace(text);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Dictionary dictionary_from_config(const Config& cfg) {
  const std::string path = resolve_config_path(cfg, "paths.dictionary");
  if (path.empty())
    raise(ErrorKind::Config, "config: paths.dictionary is required");
  return load_dictionary(path);
}

std::vector<std::vector<std::string>> phrases_from_config(const Config& cfg) {
  const std::string path = resolve_config_path(cfg, "paths.phrases");
  if (path.empty())
    raise(ErrorKind::Config, "config: paths.phrases is required");
  return load_phrases(path);
}

std::string report_summary(const char* kind, const EvalReport& report) {
  std::string s = std::string(kind) + " items=" +
                  std::to_string(report.items.size()) +
                  " ler=" + fmt_double(report.mean_ler) +
                  " wer=" + fmt_double(report.mean_wer);
  for (int n = 0; n < 5; ++n)
    s += " top" + std::to_string(n + 1) + "=" +
         fmt_double(report.top_n_accuracy[n]);
  s += " wpm=" + fmt_double(report.words_per_minute);
  return s;
}

}  // namespace

extern "C" {

const char* sr_status_name(sr_status status) {
  switch (status) {
    case SR_OK:
      return "ok";
    case SR_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case SR_ERR_CONFIG:
      return "config";
    case SR_ERR_FORMAT:
      return "format";
    case SR_ERR_INSUFFICIENT_DATA:
      return "insufficient_data";
    case SR_ERR_ALIGNMENT:
      return "alignment";
    case SR_ERR_INFEASIBLE_ALIGNMENT:
      return "infeasible_alignment";
    case SR_ERR_NUMERIC:
      return "numeric";
    case SR_ERR_DATA:
      return "data";
    case SR_ERR_IO:
      return "io";
    case SR_ERR_UNKNOWN:
      break;
  }
  return "unknown";
}

const char* sr_last_error(void) { return g_last_error.c_str(); }

const char* sr_version(void) { return "0.1.0"; }

void sr_string_free(char* s) { std::free(s); }

sr_status sr_levenshtein(const char* a, const char* b, size_t* out) {
  return wrap([&] {
    require_arg(a, "a");
    require_arg(b, "b");
    require_arg(out, "out");
    *out = levenshtein(a, b);
  });
}

sr_status sr_ler(const char* reference, const char* hypothesis, double* out) {
  return wrap([&] {
    require_arg(reference, "reference");
    require_arg(hypothesis, "hypothesis");
    require_arg(out, "out");
    *out = ler(reference, hypothesis);
  });
}

sr_status sr_wer(const char* reference, const char* hypothesis, double* out) {
  return wrap([&] {
    require_arg(reference, "reference");
    require_arg(hypothesis, "hypothesis");
    require_arg(out, "out");
    *out = wer(split_words(reference), split_words(hypothesis));
  });
}

sr_status sr_max_range_m(double sound_speed_mps, double chirp_duration_s,
                         double* out) {
  return wrap([&] {
    require_arg(out, "out");
    ChirpConfig chirp;
    chirp.sound_speed = sound_speed_mps;
    chirp.chirp_duration = chirp_duration_s;
    validate(chirp);
    *out = max_range(chirp);
  });
}

sr_status sr_dictionary_load(const char* path, sr_dictionary** out) {
  return wrap([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    auto* handle = new sr_dictionary{load_dictionary(path)};
    *out = handle;
  });
}

void sr_dictionary_free(sr_dictionary* dict) { delete dict; }

sr_status sr_dictionary_size(const sr_dictionary* dict, size_t* out) {
  return wrap([&] {
    require_arg(dict, "dict");
    require_arg(out, "out");
    *out = dict->dict.entries.size();
  });
}

sr_status sr_correct(const sr_dictionary* dict, const char* raw, size_t top_n,
                     char** out_lines) {
  return wrap([&] {
    require_arg(dict, "dict");
    require_arg(raw, "raw");
    require_arg(out_lines, "out_lines");
    std::string text;
    for (const Candidate& c : correct(raw, dict->dict, top_n)) {
      text += c.word + '\t' + std::to_string(c.distance) + '\t' +
              fmt_double(c.similarity) + '\n';
    }
    *out_lines = dup_string(text);
  });
}

sr_status sr_ngram_fit(const char* phrases_path, double k, sr_ngram** out) {
  return wrap([&] {
    require_arg(phrases_path, "phrases_path");
    require_arg(out, "out");
    *out = new sr_ngram{fit_ngram(load_phrases(phrases_path), k)};
  });
}

void sr_ngram_free(sr_ngram* lm) { delete lm; }

sr_status sr_ngram_score(const sr_ngram* lm, const char* words, double* out) {
  return wrap([&] {
    require_arg(lm, "lm");
    require_arg(words, "words");
    require_arg(out, "out");
    *out = score_sequence(lm->lm, split_words(words));
  });
}

sr_status sr_model_load(const char* path, sr_model** out) {
  return wrap([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    *out = new sr_model{load_model(path)};
  });
}

sr_status sr_model_save(const sr_model* model, const char* path) {
  return wrap([&] {
    require_arg(model, "model");
    require_arg(path, "path");
    save_model(model->params, path);
  });
}

void sr_model_free(sr_model* model) { delete model; }

sr_status sr_model_modality(const sr_model* model, char** out) {
  return wrap([&] {
    require_arg(model, "model");
    require_arg(out, "out");
    *out = dup_string(modality_name(model->params.modality));
  });
}

sr_status sr_simulate(const char* config_path, int seed_given, uint64_t seed,
                      const char* out_dir, char** out_summary) {
  return wrap([&] {
    require_arg(config_path, "config_path");
    require_arg(out_dir, "out_dir");
    require_arg(out_summary, "out_summary");
    const Config cfg = Config::load(config_path);
    SynthConfig synth = synth_from_config(cfg);
    if (seed_given) synth.seed = seed;
    const LetterBank bank = bank_from_config(cfg);
    const std::string kind = cfg.get_string("simulate.kind", "words");
    std::string summary;
    if (kind == "words") {
      const Dictionary dict = dictionary_from_config(cfg);
      const std::size_t sessions =
          static_cast<std::size_t>(cfg.get_u64("synth.sessions", 2));
      const std::vector<SessionRef> refs =
          gen_corpus(bank, dict, sessions, synth, out_dir);
      summary = "kind=words sessions=" + std::to_string(refs.size()) +
                " items=" + std::to_string(refs.size() * dict.entries.size()) +
                " root=" + out_dir;
    } else if (kind == "phrases") {
      const std::vector<std::vector<std::string>> phrases =
          phrases_from_config(cfg);
      gen_phrase_corpus(bank, phrases, synth, out_dir);
      std::size_t words = 0;
      for (const auto& p : phrases) words += p.size();
      summary = "kind=phrases phrases=" + std::to_string(phrases.size()) +
                " items=" + std::to_string(words) + " root=" + out_dir;
    } else {
      raise(ErrorKind::Config,
            "config: simulate.kind must be 'words' or 'phrases', got '" +
                kind + "'");
    }
    *out_summary = dup_string(summary);
  });
}

sr_status sr_features(const char* config_path, const char* corpus_root,
                      const char* item_id, const char* out_dir,
                      char** out_summary) {
  return wrap([&] {
    require_arg(config_path, "config_path");
    require_arg(corpus_root, "corpus_root");
    require_arg(out_dir, "out_dir");
    require_arg(out_summary, "out_summary");
    const Config cfg = Config::load(config_path);
    const FeatureConfig fcfg = features_from_config(cfg);

    std::string table = "id\tword\tframes\tacoustic_bins\tframe_period\n";
    std::size_t count = 0;
    bool found = false;
    for (const SessionRef& ref :
         read_corpus_index(join_path(corpus_root, "corpus.tsv"))) {
      for (const ManifestItem& item :
           read_manifest(join_path(corpus_root, ref.manifest_path))) {
        if (item_id != nullptr && item.id != item_id) continue;
        found = true;
        const FusedWindow window = load_item_features(corpus_root, item, fcfg);
        table += item.id + '\t' + item.word + '\t' +
                 std::to_string(window.acoustic_feats.cols()) + '\t' +
                 std::to_string(window.acoustic_feats.rows()) + '\t' +
                 fmt_double(window.frame_period) + '\n';
        ++count;
      }
    }
    if (item_id != nullptr && !found)
      raise(ErrorKind::Data, std::string("no item with id '") + item_id + "'");
    ensure_directory(out_dir);
    const std::string table_path = join_path(out_dir, "features.tsv");
    write_text_file(table_path, table);
    *out_summary = dup_string(
        "items=" + std::to_string(count) + " table=" + table_path);
  });
}

sr_status sr_train(const char* config_path, int seed_given, uint64_t seed,
                   const char* corpus_root, const char* model_path,
                   char** out_summary) {
  return wrap([&] {
    require_arg(config_path, "config_path");
    require_arg(corpus_root, "corpus_root");
    require_arg(model_path, "model_path");
    require_arg(out_summary, "out_summary");
    const Config cfg = Config::load(config_path);
    PipelineConfig pcfg = pipeline_from_config(cfg);
    if (seed_given) pcfg.train.seed = seed;
    const std::string pretrained_path =
        resolve_config_path(cfg, "train.pretrained");
    if (!pretrained_path.empty())
      pcfg.train.pretrained = load_model(pretrained_path);

    const TrainResult result = train_pipeline(corpus_root, pcfg);
    ensure_directory(parent_dir(model_path));
    save_model(result.params, model_path);
    std::string summary =
        "epochs=" + std::to_string(result.train_loss.size()) +
        " best_heldout=" + fmt_double(result.best_heldout);
    if (!result.train_loss.empty())
      summary += " final_train_loss=" + fmt_double(result.train_loss.back());
    summary += std::string(" model=") + model_path;
    *out_summary = dup_string(summary);
  });
}

sr_status sr_eval_words(const char* config_path, const char* corpus_root,
                        const char* model_path, const char* report_path,
                        char** out_summary) {
  return wrap([&] {
    require_arg(config_path, "config_path");
    require_arg(corpus_root, "corpus_root");
    require_arg(model_path, "model_path");
    require_arg(report_path, "report_path");
    require_arg(out_summary, "out_summary");
    const Config cfg = Config::load(config_path);
    const PipelineConfig pcfg = pipeline_from_config(cfg);
    const Dictionary dict = dictionary_from_config(cfg);
    const ModelParams params = load_model(model_path);
    const EvalReport report = eval_words(corpus_root, params, dict, pcfg);
    ensure_directory(parent_dir(report_path));
    write_text_file(report_path, format_report(report));
    *out_summary = dup_string(report_summary("mode=words", report) +
                              " report=" + report_path);
  });
}

sr_status sr_eval_phrases(const char* config_path, const char* corpus_root,
                          const char* model_path, const char* report_path,
                          char** out_summary) {
  return wrap([&] {
    require_arg(config_path, "config_path");
    require_arg(corpus_root, "corpus_root");
    require_arg(model_path, "model_path");
    require_arg(report_path, "report_path");
    require_arg(out_summary, "out_summary");
    const Config cfg = Config::load(config_path);
    const PipelineConfig pcfg = pipeline_from_config(cfg);
    const Dictionary dict = dictionary_from_config(cfg);
    const NGramModel lm = fit_ngram(phrases_from_config(cfg), pcfg.lm_k);
    const ModelParams params = load_model(model_path);
    const PhraseEvalResult result =
        eval_phrases(corpus_root, params, dict, lm, pcfg);
    ensure_directory(parent_dir(report_path));
    write_text_file(report_path, format_report(result.rescored));
    const std::string baseline_path = std::string(report_path) + ".nolm";
    write_text_file(baseline_path, format_report(result.baseline));
    std::string summary =
        "mode=phrases phrases=" + std::to_string(result.rescored.items.size()) +
        " wer=" + fmt_double(result.rescored.mean_wer) +
        " wer_nolm=" + fmt_double(result.baseline.mean_wer) +
        " ler=" + fmt_double(result.rescored.mean_ler) +
        " report=" + report_path;
    *out_summary = dup_string(summary);
  });
}

sr_status sr_decode(const char* config_path, const char* corpus_root,
                    const char* model_path, const char* item_id,
                    char** out_detail, char** out_summary) {
  return wrap([&] {
    require_arg(config_path, "config_path");
    require_arg(corpus_root, "corpus_root");
    require_arg(model_path, "model_path");
    require_arg(item_id, "item_id");
    require_arg(out_detail, "out_detail");
    require_arg(out_summary, "out_summary");
    const Config cfg = Config::load(config_path);
    const PipelineConfig pcfg = pipeline_from_config(cfg);
    const Dictionary dict = dictionary_from_config(cfg);
    const ModelParams params = load_model(model_path);
    const DecodeResult result =
        decode_item(corpus_root, item_id, params, dict, pcfg);

    std::string detail = "raw " + result.raw + "\n";
    detail += "corrected " +
              (result.candidates.empty() ? std::string()
                                         : result.candidates.front().word) +
              "\n";
    const std::size_t shown = std::min<std::size_t>(5, result.candidates.size());
    for (std::size_t i = 0; i < shown; ++i)
      detail += "candidate " + result.candidates[i].word + " " +
                fmt_double(result.candidates[i].similarity) + "\n";
    *out_detail = dup_string(detail);
    *out_summary = dup_string(
        "item=" + result.item_id + " truth=" + result.truth +
        " raw=" + result.raw + " top1=" +
        (result.candidates.empty() ? std::string()
                                   : result.candidates.front().word));
  });
}

}  // extern "C"
