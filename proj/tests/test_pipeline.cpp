#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "spellring/error.hpp"
#include "spellring/features.hpp"
#include "spellring/io.hpp"
#include "spellring/lang_model.hpp"
#include "spellring/pipeline.hpp"
#include "spellring/simulator.hpp"

using namespace spellring;

namespace {

SynthConfig quiet_synth() {
  SynthConfig cfg;
  cfg.noise_snr_db = std::numeric_limits<double>::infinity();
  cfg.coarticulation = 0.15;
  cfg.letters_per_second = 4.0;
  return cfg;
}

std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  return "/tmp/spellring_pipe_" + tag + "_" + std::to_string(counter++) +
         "_" + std::to_string(::getpid());
}

PipelineConfig small_pipeline() {
  PipelineConfig cfg;
  cfg.train.learning_rate = 3e-3;
  cfg.train.batch_size = 4;
  cfg.train.epochs = 20;
  cfg.train.noise_std = 0.02;
  cfg.train.max_concat_words = 1;
  cfg.train.pad_fraction = 0.1;
  cfg.train.dropout = 0.0;
  cfg.train.seed = 5;
  cfg.beam_width = 8;
  cfg.top_n = 5;
  return cfg;
}

}  // namespace

TEST_CASE("extract_features yields the documented shapes and scaling") {
  LetterBank bank = default_letter_bank();
  SynthConfig synth = quiet_synth();
  SynthResult word = synthesize_word(bank, "cab", synth);

  FeatureConfig cfg;
  FusedWindow window = extract_features(word.audio, word.gyro, cfg);
  REQUIRE(window.acoustic_feats.rows() == 48);
  REQUIRE(window.motion_feats.rows() == 3);
  CHECK(window.acoustic_feats.cols() == window.motion_feats.cols());
  CHECK(window.frame_period ==
        doctest::Approx(4.0 * cfg.chirp.chirp_duration));

  // Word lasts ~0.825 s -> ~412 chirp frames -> ~102 feature frames.
  const double duration = static_cast<double>(word.audio.samples.size()) /
                          cfg.chirp.sample_rate;
  const std::size_t expect =
      (static_cast<std::size_t>(duration / cfg.chirp.chirp_duration) - 1) / 4;
  CHECK(window.acoustic_feats.cols() == expect);

  double sum_sq = 0.0;
  for (std::size_t r = 0; r < window.acoustic_feats.rows(); ++r)
    for (std::size_t c = 0; c < window.acoustic_feats.cols(); ++c)
      sum_sq += window.acoustic_feats.at(r, c) * window.acoustic_feats.at(r, c);
  const double rms = std::sqrt(
      sum_sq / static_cast<double>(window.acoustic_feats.rows() *
                                   window.acoustic_feats.cols()));
  CHECK(rms == doctest::Approx(1.0).epsilon(1e-9));

  FusedWindow again = extract_features(word.audio, word.gyro, cfg);
  CHECK(again.acoustic_feats == window.acoustic_feats);
  CHECK(again.motion_feats == window.motion_feats);
}

TEST_CASE("extract_features validates inputs") {
  LetterBank bank = default_letter_bank();
  SynthResult word = synthesize_word(bank, "ab", quiet_synth());
  FeatureConfig cfg;

  SampleBuffer wrong_rate = word.audio;
  wrong_rate.sample_rate = 44100.0;
  CHECK_THROWS_AS(extract_features(wrong_rate, word.gyro, cfg), Error);

  FeatureConfig too_many_bins = cfg;
  too_many_bins.acoustic_bins = 200;  // chirp frame only has 100 bins
  try {
    extract_features(word.audio, word.gyro, too_many_bins);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }

  GyroStream truncated = word.gyro;
  truncated.samples.resize(truncated.samples.size() / 2);
  try {
    extract_features(word.audio, truncated, cfg);
    FAIL("expected alignment error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Alignment);
  }

  FeatureConfig bad = cfg;
  bad.time_decimation = 0;
  CHECK_THROWS_AS(extract_features(word.audio, word.gyro, bad), Error);
}

TEST_CASE("orientation pairs differ in motion features, not acoustic ones") {
  LetterBank bank = default_letter_bank();
  SynthConfig synth = quiet_synth();
  FeatureConfig cfg;
  SynthResult ka = synthesize_word(bank, "aka", synth);
  SynthResult pa = synthesize_word(bank, "apa", synth);
  FusedWindow wk = extract_features(ka.audio, ka.gyro, cfg);
  FusedWindow wp = extract_features(pa.audio, pa.gyro, cfg);
  REQUIRE(wk.acoustic_feats.cols() == wp.acoustic_feats.cols());

  double acoustic_diff = 0.0, motion_diff = 0.0;
  for (std::size_t r = 0; r < wk.acoustic_feats.rows(); ++r)
    for (std::size_t c = 0; c < wk.acoustic_feats.cols(); ++c)
      acoustic_diff += std::abs(wk.acoustic_feats.at(r, c) -
                                wp.acoustic_feats.at(r, c));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < wk.motion_feats.cols(); ++c)
      motion_diff +=
          std::abs(wk.motion_feats.at(r, c) - wp.motion_feats.at(r, c));
  CHECK(acoustic_diff == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(motion_diff > 1.0);
}

TEST_CASE("load_training_sessions round-trips a generated corpus") {
  LetterBank bank = default_letter_bank();
  Dictionary dict = make_dictionary({{"ab", 2}, {"cd", 1}});
  SynthConfig synth = quiet_synth();
  synth.noise_snr_db = 30.0;
  synth.seed = 21;
  const std::string root = temp_dir("load");
  gen_corpus(bank, dict, 3, synth, root);

  FeatureConfig fcfg;
  std::vector<TrainSession> sessions = load_training_sessions(root, fcfg);
  REQUIRE(sessions.size() == 3);
  for (const TrainSession& s : sessions) {
    REQUIRE(s.items.size() == 2);
    for (const TrainItem& item : s.items) {
      CHECK((item.label == "ab" || item.label == "cd"));
      CHECK(item.window.acoustic_feats.rows() == 48);
      CHECK(item.window.acoustic_feats.cols() > 10);
      CHECK(model_output_frames(item.window.acoustic_feats.cols()) >= 3);
    }
  }
}

TEST_CASE("trained pipeline recognizes a tiny held-out vocabulary") {
  LetterBank bank = default_letter_bank();
  Dictionary dict = make_dictionary({{"ab", 2}, {"cd", 1}});
  SynthConfig synth = quiet_synth();
  synth.noise_snr_db = 25.0;
  synth.seed = 31;
  const std::string train_root = temp_dir("train");
  gen_corpus(bank, dict, 4, synth, train_root);

  PipelineConfig cfg = small_pipeline();
  TrainResult trained = train_pipeline(train_root, cfg);
  REQUIRE(trained.train_loss.size() == cfg.train.epochs);
  CHECK(trained.train_loss.back() < trained.train_loss.front());

  SynthConfig eval_synth = synth;
  eval_synth.seed = 77;
  const std::string eval_root = temp_dir("eval");
  gen_corpus(bank, dict, 2, eval_synth, eval_root);
  EvalReport report = eval_words(eval_root, trained.params, dict, cfg);
  REQUIRE(report.items.size() == 4);
  CHECK(report.top_n_accuracy[0] >= 0.75);
  for (int n = 1; n < 5; ++n)
    CHECK(report.top_n_accuracy[n] >= report.top_n_accuracy[n - 1]);
  CHECK(report.mean_ler < 0.5);
  CHECK(report.words_per_minute > 0.0);

  // Report text round-trips through the parser.
  EvalReport parsed = parse_report(format_report(report));
  CHECK(parsed.items.size() == report.items.size());
  CHECK(parsed.mean_ler == doctest::Approx(report.mean_ler).epsilon(1e-5));
}

TEST_CASE("phrase evaluation rescores lattices and agrees with batch") {
  LetterBank bank = default_letter_bank();
  Dictionary dict =
      make_dictionary({{"go", 6}, {"hi", 4}, {"me", 3}, {"we", 2}});
  std::vector<std::vector<std::string>> phrases = {
      {"go", "hi", "me"}, {"we", "go", "go"}, {"hi", "me", "we"},
      {"go", "go", "hi"}, {"me", "we", "go"}};

  SynthConfig synth = quiet_synth();
  synth.noise_snr_db = 22.0;
  synth.seed = 13;
  const std::string train_root = temp_dir("ptrain");
  gen_corpus(bank, dict, 4, synth, train_root);
  PipelineConfig cfg = small_pipeline();
  cfg.train.epochs = 15;
  TrainResult trained = train_pipeline(train_root, cfg);

  const std::string phrase_root = temp_dir("phrase");
  SynthConfig psynth = synth;
  psynth.seed = 99;
  gen_phrase_corpus(bank, phrases, psynth, phrase_root);
  CHECK(load_phrases(join_path(phrase_root, "phrases.txt")).size() ==
        phrases.size());

  NGramModel lm = fit_ngram(phrases, cfg.lm_k);
  PhraseEvalResult result =
      eval_phrases(phrase_root, trained.params, dict, lm, cfg);
  REQUIRE(result.rescored.items.size() == phrases.size());
  REQUIRE(result.baseline.items.size() == phrases.size());
  CHECK(result.rescored.mean_wer <= result.baseline.mean_wer + 1e-12);
  for (const EvalItem& item : result.rescored.items) {
    CHECK(item.wer >= 0.0);
    CHECK(std::isfinite(item.wer));
  }

  // Width-1 candidate lists leave nothing to rescore: both flows agree.
  PipelineConfig narrow = cfg;
  narrow.top_n = 1;
  PhraseEvalResult single =
      eval_phrases(phrase_root, trained.params, dict, lm, narrow);
  CHECK(single.rescored.mean_wer == single.baseline.mean_wer);
  for (std::size_t i = 0; i < single.rescored.items.size(); ++i)
    CHECK(single.rescored.items[i].hypothesis ==
          single.baseline.items[i].hypothesis);
}

TEST_CASE("decode_item surfaces raw text and ranked corrections") {
  LetterBank bank = default_letter_bank();
  Dictionary dict = make_dictionary({{"ab", 2}, {"cd", 1}});
  SynthConfig synth = quiet_synth();
  synth.noise_snr_db = 25.0;
  synth.seed = 41;
  const std::string root = temp_dir("decode");
  gen_corpus(bank, dict, 2, synth, root);

  PipelineConfig cfg = small_pipeline();
  cfg.train.epochs = 10;
  TrainResult trained = train_pipeline(root, cfg);

  std::vector<ManifestItem> manifest =
      read_manifest(join_path(root, "session_00/manifest.tsv"));
  DecodeResult result =
      decode_item(root, manifest.front().id, trained.params, dict, cfg);
  CHECK(result.item_id == manifest.front().id);
  CHECK(result.truth == manifest.front().word);
  REQUIRE(!result.candidates.empty());
  CHECK(result.candidates.front().similarity > 0.0);
  CHECK_THROWS_AS(decode_item(root, "no_such_item", trained.params, dict, cfg),
                  Error);
}

TEST_CASE("eval_words counts unreadable items instead of aborting") {
  LetterBank bank = default_letter_bank();
  Dictionary dict = make_dictionary({{"ab", 2}, {"cd", 1}});
  SynthConfig synth = quiet_synth();
  synth.noise_snr_db = 25.0;
  synth.seed = 51;
  const std::string root = temp_dir("broken");
  gen_corpus(bank, dict, 1, synth, root);

  // Corrupt one item's audio file.
  std::vector<ManifestItem> manifest =
      read_manifest(join_path(root, "session_00/manifest.tsv"));
  write_text_file(join_path(root, manifest.front().audio_path), "xyz");

  PipelineConfig cfg = small_pipeline();
  cfg.train.epochs = 0;
  Rng rng(3);
  ModelParams params = init_model<float>(48, 0.0, Modality::Fusion, rng);
  EvalReport report = eval_words(root, params, dict, cfg);
  REQUIRE(report.items.size() == manifest.size());
  bool saw_full_error = false;
  for (const EvalItem& item : report.items)
    if (item.hypothesis.empty() && item.ler == 1.0 && item.wer == 1.0)
      saw_full_error = true;
  CHECK(saw_full_error);
}
