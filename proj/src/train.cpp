#include "spellring/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "spellring/alphabet.hpp"
#include "spellring/ctc.hpp"
#include "spellring/error.hpp"

namespace spellring {

namespace {

// Substream keys: one generator per purpose so consumption in one place never
// shifts the draws made elsewhere.
constexpr std::uint64_t kInitStream = 0x01ull << 56;
constexpr std::uint64_t kShuffleStream = 0x02ull << 56;
constexpr std::uint64_t kAugmentStream = 0x03ull << 56;
constexpr std::uint64_t kDropoutStream = 0x04ull << 56;

std::uint64_t batch_key(std::uint64_t base, std::size_t epoch,
                        std::size_t batch) {
  return base | (static_cast<std::uint64_t>(epoch) << 28) |
         static_cast<std::uint64_t>(batch);
}

bool label_fits(const std::string& label, std::size_t frames) {
  if (label.empty()) return false;
  return model_output_frames(frames) >= ctc_min_frames(label_indices(label));
}

struct AdamState {
  ModelParams m, v;
  std::size_t step = 0;
};

void adam_step(ModelParams* params, ModelParams* grads, AdamState* state,
               double lr) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  state->step += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state->step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state->step));
  auto ps = param_tensors(*params);
  auto gs = param_tensors(*grads);
  auto ms = param_tensors(state->m);
  auto vs = param_tensors(state->v);
  for (std::size_t t = 0; t < ps.size(); ++t) {
    std::vector<float>& p = *ps[t].data;
    std::vector<float>& g = *gs[t].data;
    std::vector<float>& m = *ms[t].data;
    std::vector<float>& v = *vs[t].data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      const double mi = kBeta1 * m[i] + (1.0 - kBeta1) * gi;
      const double vi = kBeta2 * v[i] + (1.0 - kBeta2) * gi * gi;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double update = lr * (mi / bc1) / (std::sqrt(vi / bc2) + kEps);
      p[i] = static_cast<float>(p[i] - update);
    }
  }
}

// Forward + CTC for one item; accumulates grads scaled by `scale` when
// grads is non-null. Returns the item's CTC loss.
double item_loss_and_grad(const ModelParams& params, const TrainItem& item,
                          double scale, Rng* dropout_rng, ModelParams* grads) {
  ForwardTraceT<float> trace;
  Matrix posterior =
      model_forward(params, item.window, grads ? &trace : nullptr,
                    dropout_rng);
  CtcTrellis trellis =
      ctc_forward_backward(posterior, label_indices(item.label), kBlank);
  if (grads != nullptr) {
    Matrix g = trellis.grad_logits;
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) g.at(r, c) *= scale;
    model_backward(params, trace, g, grads);
  }
  return trellis.loss;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
    raise(ErrorKind::Config, "train: learning_rate must be positive");
  if (cfg.batch_size == 0)
    raise(ErrorKind::Config, "train: batch_size must be at least 1");
  if (!(cfg.noise_std >= 0.0) || !std::isfinite(cfg.noise_std))
    raise(ErrorKind::Config, "train: noise_std must be non-negative");
  if (cfg.max_concat_words < 1 || cfg.max_concat_words > 4)
    raise(ErrorKind::Config, "train: max_concat_words must be in [1, 4]");
  if (!(cfg.concat_prob >= 0.0 && cfg.concat_prob <= 1.0))
    raise(ErrorKind::Config, "train: concat_prob must be in [0, 1]");
  if (!(cfg.pad_fraction >= 0.0 && cfg.pad_fraction < 1.0))
    raise(ErrorKind::Config, "train: pad_fraction must be in [0, 1)");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0))
    raise(ErrorKind::Config, "train: dropout must be in [0, 1)");
}

FusedWindow concat_windows(const std::vector<const FusedWindow*>& parts) {
  if (parts.empty())
    raise(ErrorKind::InvalidArgument, "concat_windows: no parts");
  const FusedWindow& head = *parts.front();
  std::size_t total = 0;
  for (const FusedWindow* p : parts) {
    validate(*p);
    if (p->acoustic_feats.rows() != head.acoustic_feats.rows())
      raise(ErrorKind::InvalidArgument,
            "concat_windows: acoustic feature count mismatch");
    if (p->frame_period != head.frame_period)
      raise(ErrorKind::InvalidArgument,
            "concat_windows: frame period mismatch");
    total += p->acoustic_feats.cols();
  }
  FusedWindow out;
  out.frame_period = head.frame_period;
  out.acoustic_feats = Matrix(head.acoustic_feats.rows(), total);
  out.motion_feats = Matrix(3, total);
  std::size_t offset = 0;
  for (const FusedWindow* p : parts) {
    const std::size_t frames = p->acoustic_feats.cols();
    for (std::size_t r = 0; r < out.acoustic_feats.rows(); ++r)
      for (std::size_t c = 0; c < frames; ++c)
        out.acoustic_feats.at(r, offset + c) = p->acoustic_feats.at(r, c);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < frames; ++c)
        out.motion_feats.at(r, offset + c) = p->motion_feats.at(r, c);
    offset += frames;
  }
  return out;
}

FusedWindow pad_window(const FusedWindow& window, std::size_t frames,
                       bool at_end) {
  validate(window);
  if (frames == 0) return window;
  const std::size_t old_t = window.acoustic_feats.cols();
  const std::size_t new_t = old_t + frames;
  FusedWindow out;
  out.frame_period = window.frame_period;
  out.acoustic_feats = Matrix(window.acoustic_feats.rows(), new_t);
  out.motion_feats = Matrix(3, new_t);
  const std::size_t shift = at_end ? 0 : frames;
  for (std::size_t r = 0; r < out.acoustic_feats.rows(); ++r)
    for (std::size_t c = 0; c < old_t; ++c)
      out.acoustic_feats.at(r, shift + c) = window.acoustic_feats.at(r, c);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < old_t; ++c)
      out.motion_feats.at(r, shift + c) = window.motion_feats.at(r, c);
  return out;
}

void add_noise(FusedWindow& window, double noise_std, Rng& rng) {
  if (noise_std == 0.0) return;
  for (std::size_t r = 0; r < window.acoustic_feats.rows(); ++r)
    for (std::size_t c = 0; c < window.acoustic_feats.cols(); ++c)
      window.acoustic_feats.at(r, c) += rng.gaussian(0.0, noise_std);
  for (std::size_t r = 0; r < window.motion_feats.rows(); ++r)
    for (std::size_t c = 0; c < window.motion_feats.cols(); ++c)
      window.motion_feats.at(r, c) += rng.gaussian(0.0, noise_std);
}

std::vector<TrainItem> augment(const std::vector<TrainItem>& batch,
                               const TrainConfig& cfg, Rng& rng) {
  validate(cfg);
  std::vector<TrainItem> out;
  out.reserve(batch.size());
  for (const TrainItem& base : batch) {
    TrainItem item = base;
    if (cfg.max_concat_words > 1 && batch.size() > 1 &&
        rng.chance(cfg.concat_prob)) {
      const std::size_t words =
          2 + static_cast<std::size_t>(rng.below(cfg.max_concat_words - 1));
      std::vector<const FusedWindow*> parts{&base.window};
      std::string label = base.label;
      std::size_t total_frames = base.window.acoustic_feats.cols();
      for (std::size_t w = 1; w < words; ++w) {
        const TrainItem& partner =
            batch[static_cast<std::size_t>(rng.below(batch.size()))];
        parts.push_back(&partner.window);
        label += partner.label;
        total_frames += partner.window.acoustic_feats.cols();
      }
      if (label_fits(label, total_frames)) {
        item.window = concat_windows(parts);
        item.label = label;
      }
    }
    add_noise(item.window, cfg.noise_std, rng);
    if (cfg.pad_fraction > 0.0) {
      const std::size_t frames = item.window.acoustic_feats.cols();
      const std::size_t max_pad = static_cast<std::size_t>(
          cfg.pad_fraction * static_cast<double>(frames));
      if (max_pad > 0) {
        const std::size_t pad =
            static_cast<std::size_t>(rng.below(max_pad + 1));
        if (pad > 0) item.window = pad_window(item.window, pad, rng.chance(0.5));
      }
    }
    out.push_back(std::move(item));
  }
  return out;
}

double mean_ctc_loss(const ModelParams& params,
                     const std::vector<TrainItem>& items) {
  if (items.empty())
    raise(ErrorKind::InvalidArgument, "mean_ctc_loss: no items");
  double total = 0.0;
  for (const TrainItem& item : items)
    total += item_loss_and_grad(params, item, 0.0, nullptr, nullptr);
  return total / static_cast<double>(items.size());
}

TrainResult train(const std::vector<TrainSession>& corpus,
                  const TrainConfig& cfg) {
  validate(cfg);
  std::vector<TrainItem> all;
  std::vector<std::size_t> session_start;  // index of each session's first item
  for (const TrainSession& session : corpus) {
    session_start.push_back(all.size());
    for (const TrainItem& item : session.items) all.push_back(item);
  }
  if (all.empty()) raise(ErrorKind::Data, "train: corpus has no items");

  const std::size_t bins = all.front().window.acoustic_feats.rows();
  std::string bad;
  std::size_t bad_count = 0;
  for (const TrainItem& item : all) {
    validate(item.window);
    if (item.window.acoustic_feats.rows() != bins)
      raise(ErrorKind::Data,
            "train: item '" + item.id + "' has " +
                std::to_string(item.window.acoustic_feats.rows()) +
                " acoustic features, expected " + std::to_string(bins));
    if (!label_fits(item.label, item.window.acoustic_feats.cols())) {
      ++bad_count;
      if (bad_count <= 5) {
        if (!bad.empty()) bad += "; ";
        bad += item.id + " (label '" + item.label + "' needs " +
               std::to_string(item.label.empty()
                                  ? 1
                                  : ctc_min_frames(label_indices(item.label))) +
               " output frames, window yields " +
               std::to_string(
                   model_output_frames(item.window.acoustic_feats.cols())) +
               ")";
      }
    }
  }
  if (bad_count > 0)
    raise(ErrorKind::Data, "train: " + std::to_string(bad_count) +
                               " item(s) cannot align their labels: " + bad);

  // Held-out split: the last session when there are several, otherwise the
  // tail tenth of the single session. Selection falls back to the training
  // items if nothing can be held out.
  std::vector<TrainItem> train_items, heldout;
  if (corpus.size() >= 2) {
    const std::size_t cut = session_start.back();
    train_items.assign(all.begin(), all.begin() + cut);
    heldout.assign(all.begin() + cut, all.end());
  } else {
    std::size_t n_held = std::max<std::size_t>(1, all.size() / 10);
    if (n_held >= all.size()) n_held = all.size() - 1;
    train_items.assign(all.begin(), all.end() - n_held);
    heldout.assign(all.end() - n_held, all.end());
  }
  const std::vector<TrainItem>& selection =
      heldout.empty() ? train_items : heldout;

  Rng root(cfg.seed);
  ModelParams params;
  if (cfg.pretrained.has_value()) {
    if (cfg.pretrained->acoustic_bins != bins)
      raise(ErrorKind::Config,
            "train: pretrained model expects " +
                std::to_string(cfg.pretrained->acoustic_bins) +
                " acoustic features, corpus has " + std::to_string(bins));
    params = *cfg.pretrained;
    params.dropout = cfg.dropout;
    params.modality = cfg.modality;
  } else {
    Rng init_rng = root.substream(kInitStream);
    params = init_model<float>(bins, cfg.dropout, cfg.modality, init_rng);
  }

  TrainResult result;
  result.heldout_loss.push_back(mean_ctc_loss(params, selection));
  result.best_heldout = result.heldout_loss.back();
  result.params = params;

  AdamState adam{zeros_like(params), zeros_like(params), 0};
  std::vector<std::size_t> order(train_items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng = root.substream(kShuffleStream | epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.below(i));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t epoch_items = 0;
    const std::size_t n_batches =
        (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t lo = b * cfg.batch_size;
      const std::size_t hi = std::min(lo + cfg.batch_size, order.size());
      std::vector<TrainItem> batch;
      batch.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i)
        batch.push_back(train_items[order[i]]);

      Rng aug_rng = root.substream(batch_key(kAugmentStream, epoch, b));
      Rng drop_rng = root.substream(batch_key(kDropoutStream, epoch, b));
      std::vector<TrainItem> ready = augment(batch, cfg, aug_rng);

      ModelParams grads = zeros_like(params);
      const double scale = 1.0 / static_cast<double>(ready.size());
      for (const TrainItem& item : ready) {
        epoch_loss +=
            item_loss_and_grad(params, item, scale, &drop_rng, &grads);
        ++epoch_items;
      }
      adam_step(&params, &grads, &adam, cfg.learning_rate);
    }

    result.train_loss.push_back(epoch_loss /
                                static_cast<double>(epoch_items));
    result.heldout_loss.push_back(mean_ctc_loss(params, selection));
    if (result.heldout_loss.back() < result.best_heldout) {
      result.best_heldout = result.heldout_loss.back();
      result.params = params;
    }
    if (cfg.on_epoch)
      cfg.on_epoch(epoch, result.train_loss.back(),
                   result.heldout_loss.back());
  }
  return result;
}

}  // namespace spellring
