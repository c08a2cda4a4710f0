#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "spellring/alphabet.hpp"
#include "spellring/ctc.hpp"
#include "spellring/error.hpp"
#include "spellring/model.hpp"
#include "spellring/rng.hpp"
#include "spellring/train.hpp"

using namespace spellring;

namespace {

FusedWindow make_window(std::size_t bins, std::size_t frames,
                        const std::string& label) {
  FusedWindow w;
  w.frame_period = 0.01;
  w.acoustic_feats = Matrix(bins, frames);
  w.motion_feats = Matrix(3, frames);
  // Deterministic letter-dependent pattern: each column carries a smooth
  // signature of the letter active in that part of the window.
  for (std::size_t c = 0; c < frames; ++c) {
    const std::size_t pos = label.empty() ? 0 : (c * label.size()) / frames;
    const double letter =
        label.empty() ? 0.0 : static_cast<double>(label[pos] - 'a');
    for (std::size_t r = 0; r < bins; ++r)
      w.acoustic_feats.at(r, c) =
          std::sin(0.37 * letter + 0.9 * static_cast<double>(r)) +
          0.05 * std::cos(0.11 * static_cast<double>(c));
    for (std::size_t r = 0; r < 3; ++r)
      w.motion_feats.at(r, c) =
          std::cos(0.53 * letter + 0.7 * static_cast<double>(r));
  }
  return w;
}

TrainItem make_item(const std::string& id, const std::string& label,
                    std::size_t bins, std::size_t frames) {
  return TrainItem{id, make_window(bins, frames, label), label};
}

std::vector<TrainSession> two_letter_corpus(std::size_t bins,
                                            std::size_t frames) {
  const std::vector<std::string> words = {"ab", "cd", "ef", "gh", "ij",
                                          "kl", "mn", "op", "qr", "st"};
  TrainSession a{"s0", {}};
  TrainSession b{"s1", {}};
  for (std::size_t i = 0; i < words.size(); ++i) {
    TrainItem item = make_item("s" + std::to_string(i < 8 ? 0 : 1) + "/w" +
                                   std::to_string(i),
                               words[i], bins, frames);
    (i < 8 ? a : b).items.push_back(item);
  }
  return {a, b};
}

bool same_params(ModelParams lhs, ModelParams rhs) {
  auto lt = param_tensors(lhs);
  auto rt = param_tensors(rhs);
  if (lt.size() != rt.size()) return false;
  for (std::size_t i = 0; i < lt.size(); ++i)
    if (*lt[i].data != *rt[i].data) return false;
  return true;
}

}  // namespace

TEST_CASE("augment with everything disabled is the identity") {
  std::vector<TrainItem> batch = {make_item("a", "ab", 6, 40),
                                  make_item("b", "cd", 6, 52)};
  TrainConfig cfg;
  cfg.noise_std = 0.0;
  cfg.pad_fraction = 0.0;
  cfg.max_concat_words = 1;
  Rng rng(9);
  std::vector<TrainItem> out = augment(batch, cfg, rng);
  REQUIRE(out.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(out[i].label == batch[i].label);
    CHECK(out[i].window.acoustic_feats == batch[i].window.acoustic_feats);
    CHECK(out[i].window.motion_feats == batch[i].window.motion_feats);
    CHECK(out[i].window.frame_period == batch[i].window.frame_period);
  }
}

TEST_CASE("concat_windows joins along time in order") {
  FusedWindow w1 = make_window(4, 5, "ab");
  FusedWindow w2 = make_window(4, 3, "cd");
  FusedWindow joined = concat_windows({&w1, &w2});
  REQUIRE(joined.acoustic_feats.cols() == 8);
  REQUIRE(joined.motion_feats.cols() == 8);
  CHECK(joined.frame_period == w1.frame_period);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 5; ++c)
      CHECK(joined.acoustic_feats.at(r, c) == w1.acoustic_feats.at(r, c));
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(joined.acoustic_feats.at(r, 5 + c) == w2.acoustic_feats.at(r, c));
  }
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 5; ++c)
      CHECK(joined.motion_feats.at(r, c) == w1.motion_feats.at(r, c));
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(joined.motion_feats.at(r, 5 + c) == w2.motion_feats.at(r, c));
  }
  FusedWindow bad = make_window(5, 3, "x");
  CHECK_THROWS_AS(concat_windows({&w1, &bad}), Error);
}

TEST_CASE("pad_window adds zero columns and keeps content") {
  FusedWindow w = make_window(4, 6, "ab");
  FusedWindow front = pad_window(w, 4, /*at_end=*/false);
  FusedWindow back = pad_window(w, 4, /*at_end=*/true);
  REQUIRE(front.acoustic_feats.cols() == 10);
  REQUIRE(back.acoustic_feats.cols() == 10);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(front.acoustic_feats.at(r, c) == 0.0);
      CHECK(back.acoustic_feats.at(r, 6 + c) == 0.0);
    }
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(front.acoustic_feats.at(r, 4 + c) == w.acoustic_feats.at(r, c));
      CHECK(back.acoustic_feats.at(r, c) == w.acoustic_feats.at(r, c));
    }
  }
  for (std::size_t c = 0; c < 4; ++c) CHECK(front.motion_feats.at(1, c) == 0.0);
  CHECK(pad_window(w, 0, true).acoustic_feats == w.acoustic_feats);
}

TEST_CASE("noise and padding never alter the label") {
  std::vector<TrainItem> batch;
  for (int i = 0; i < 6; ++i)
    batch.push_back(make_item("i" + std::to_string(i),
                              std::string(1, static_cast<char>('a' + i)), 5,
                              40));
  TrainConfig cfg;
  cfg.noise_std = 0.3;
  cfg.pad_fraction = 0.25;
  cfg.max_concat_words = 1;
  Rng rng(17);
  bool padded_somewhere = false;
  bool noised = false;
  for (int round = 0; round < 10; ++round) {
    std::vector<TrainItem> out = augment(batch, cfg, rng);
    REQUIRE(out.size() == batch.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].label == batch[i].label);
      CHECK(out[i].window.acoustic_feats.cols() >=
            batch[i].window.acoustic_feats.cols());
      if (out[i].window.acoustic_feats.cols() >
          batch[i].window.acoustic_feats.cols())
        padded_somewhere = true;
      if (!(out[i].window.acoustic_feats == batch[i].window.acoustic_feats))
        noised = true;
    }
  }
  CHECK(padded_somewhere);
  CHECK(noised);
}

TEST_CASE("concatenation joins labels and window lengths consistently") {
  std::vector<TrainItem> batch;
  for (int i = 0; i < 4; ++i)
    batch.push_back(make_item("i" + std::to_string(i),
                              std::string(1, static_cast<char>('a' + i)), 5,
                              64));
  TrainConfig cfg;
  cfg.noise_std = 0.0;
  cfg.pad_fraction = 0.0;
  cfg.max_concat_words = 3;
  cfg.concat_prob = 1.0;
  Rng rng(23);
  bool saw_concat = false;
  for (int round = 0; round < 8; ++round) {
    std::vector<TrainItem> out = augment(batch, cfg, rng);
    for (const TrainItem& item : out) {
      // Every output window is a whole number of 64-frame words matching the
      // label length, and the first letter is the original item's.
      REQUIRE(!item.label.empty());
      CHECK(item.window.acoustic_feats.cols() == 64 * item.label.size());
      CHECK(item.label.size() <= 3);
      if (item.label.size() > 1) saw_concat = true;
    }
  }
  CHECK(saw_concat);
}

TEST_CASE("infeasible concatenations are skipped, not emitted") {
  // 8-frame windows emit one posterior frame each, so a 2-letter join (16
  // frames -> still one posterior frame) can never fit its label.
  std::vector<TrainItem> batch = {make_item("a", "a", 5, 8),
                                  make_item("b", "b", 5, 8)};
  TrainConfig cfg;
  cfg.noise_std = 0.0;
  cfg.pad_fraction = 0.0;
  cfg.max_concat_words = 2;
  cfg.concat_prob = 1.0;
  Rng rng(4);
  for (int round = 0; round < 5; ++round) {
    std::vector<TrainItem> out = augment(batch, cfg, rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].label == batch[i].label);
      CHECK(out[i].window.acoustic_feats.cols() == 8);
    }
  }
}

TEST_CASE("training rejects items whose label cannot fit the window") {
  std::vector<TrainSession> corpus = {
      {"s0",
       {make_item("s0/ok", "ab", 6, 48),
        make_item("s0/too_small", "hello", 6, 32),
        make_item("s0/fine", "cd", 6, 48)}}};
  TrainConfig cfg;
  cfg.epochs = 1;
  try {
    train(corpus, cfg);
    FAIL("expected a data error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    CHECK(std::string(e.what()).find("s0/too_small") != std::string::npos);
    CHECK(std::string(e.what()).find("hello") != std::string::npos);
  }
}

TEST_CASE("loss drops over a few epochs on a small corpus") {
  std::vector<TrainSession> corpus = two_letter_corpus(6, 48);
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.batch_size = 4;
  cfg.epochs = 6;
  cfg.noise_std = 0.01;
  cfg.max_concat_words = 1;
  cfg.pad_fraction = 0.1;
  cfg.dropout = 0.0;
  cfg.seed = 3;
  TrainResult result = train(corpus, cfg);
  REQUIRE(result.train_loss.size() == 6);
  REQUIRE(result.heldout_loss.size() == 7);
  CHECK(result.train_loss[5] < result.train_loss[0]);
  double best = result.heldout_loss[0];
  for (double h : result.heldout_loss) best = std::min(best, h);
  CHECK(result.best_heldout == best);
  for (double v : result.train_loss) CHECK(std::isfinite(v));
}

TEST_CASE("identical seeds give bitwise-identical parameters") {
  std::vector<TrainSession> corpus = two_letter_corpus(5, 48);
  TrainConfig cfg;
  cfg.learning_rate = 2e-3;
  cfg.batch_size = 3;
  cfg.epochs = 2;
  cfg.seed = 11;
  cfg.dropout = 0.1;
  TrainResult a = train(corpus, cfg);
  TrainResult b = train(corpus, cfg);
  CHECK(same_params(a.params, b.params));
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.heldout_loss == b.heldout_loss);
  cfg.seed = 12;
  TrainResult c = train(corpus, cfg);
  CHECK(!same_params(a.params, c.params));
}

TEST_CASE("pretrained weights seed the run and epochs=0 returns them") {
  std::vector<TrainSession> corpus = two_letter_corpus(5, 48);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 5;
  TrainResult first = train(corpus, cfg);

  TrainConfig warm;
  warm.epochs = 0;
  warm.seed = 99;
  warm.pretrained = first.params;
  TrainResult resumed = train(corpus, warm);
  CHECK(same_params(resumed.params, first.params));
  REQUIRE(resumed.heldout_loss.size() == 1);

  std::vector<TrainItem> heldout = corpus.back().items;
  CHECK(resumed.best_heldout ==
        doctest::Approx(mean_ctc_loss(first.params, heldout)).epsilon(1e-12));

  TrainConfig bad;
  bad.pretrained = first.params;  // 5 acoustic features
  std::vector<TrainSession> other = two_letter_corpus(6, 48);
  CHECK_THROWS_AS(train(other, bad), Error);
}

TEST_CASE("config validation rejects out-of-range settings") {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.max_concat_words = 5;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.max_concat_words = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.pad_fraction = 1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.concat_prob = -0.1;
  CHECK_THROWS_AS(validate(cfg), Error);
}
