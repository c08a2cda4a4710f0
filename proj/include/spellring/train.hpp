#ifndef SPELLRING_TRAIN_HPP
#define SPELLRING_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spellring/model.hpp"
#include "spellring/rng.hpp"

namespace spellring {

// One labeled window; id shows up in error messages and reports.
struct TrainItem {
  std::string id;
  FusedWindow window;
  std::string label;
};

// A recording session: items that share normalization statistics. The last
// session (or the tail of a single session) acts as the held-out split.
struct TrainSession {
  std::string id;
  std::vector<TrainItem> items;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 30;
  double noise_std = 0.05;
  std::size_t max_concat_words = 4;  // in [1, 4]; 1 disables concatenation
  double concat_prob = 0.5;
  double pad_fraction = 0.15;  // max padding as a fraction of window length
  double dropout = 0.2;
  std::uint64_t seed = 0;
  Modality modality = Modality::Fusion;
  std::optional<ModelParams> pretrained;  // two-step scheme when set

  // Optional progress hook: (epoch, mean train loss, held-out loss).
  std::function<void(std::size_t, double, double)> on_epoch;
};

void validate(const TrainConfig& cfg);

// ---- augmentation pieces (exposed for direct testing) ----

// Joins windows along time (labels are concatenated by the caller).
FusedWindow concat_windows(const std::vector<const FusedWindow*>& parts);

// Adds `frames` all-zero columns at the front or the back.
FusedWindow pad_window(const FusedWindow& window, std::size_t frames,
                       bool at_end);

void add_noise(FusedWindow& window, double noise_std, Rng& rng);

// One augmentation pass over a batch: per slot, maybe concatenate with other
// randomly drawn batch members (joining labels), then Gaussian feature noise
// and zero-padding on a random side. Labels are never altered by noise or
// padding. Combinations that could not emit their joined label are left
// unconcatenated, so every output stays CTC-feasible if every input was.
std::vector<TrainItem> augment(const std::vector<TrainItem>& batch,
                               const TrainConfig& cfg, Rng& rng);

struct TrainResult {
  ModelParams params;                // best held-out snapshot
  std::vector<double> train_loss;    // mean augmented-batch loss per epoch
  std::vector<double> heldout_loss;  // entry 0 is the pre-training baseline
  double best_heldout = 0.0;
};

// Mini-batch Adam over the mean CTC loss. Deterministic given cfg.seed:
// shuffling, augmentation, and dropout all derive from per-epoch/per-batch
// substreams. Items whose label cannot fit their window are a data error
// listing the offending ids.
TrainResult train(const std::vector<TrainSession>& corpus,
                  const TrainConfig& cfg);

// Mean CTC loss of a model over items, dropout disabled.
double mean_ctc_loss(const ModelParams& params,
                     const std::vector<TrainItem>& items);

}  // namespace spellring

#endif
