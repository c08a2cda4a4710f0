#include "spellring/features.hpp"

#include <cmath>
#include <vector>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

void validate(const FeatureConfig& cfg) {
  validate(cfg.chirp);
  if (cfg.acoustic_bins == 0)
    raise(ErrorKind::Config, "features: acoustic_bins must be positive");
  if (cfg.time_decimation == 0)
    raise(ErrorKind::Config, "features: time_decimation must be positive");
  if (cfg.bandpass &&
      (!(cfg.bandpass_low_hz > 0.0) ||
       !(cfg.bandpass_high_hz > cfg.bandpass_low_hz)))
    raise(ErrorKind::Config, "features: band edges must satisfy 0 < low < high");
}

FusedWindow extract_features(const SampleBuffer& audio,
                             const GyroStream& gyro,
                             const FeatureConfig& cfg) {
  validate(cfg);
  if (audio.sample_rate != cfg.chirp.sample_rate)
    raise(ErrorKind::Format,
          "features: audio sample rate " + std::to_string(audio.sample_rate) +
              " does not match the chirp config");

  const SampleBuffer* signal = &audio;
  SampleBuffer filtered;
  if (cfg.bandpass) {
    filtered = band_pass(audio, cfg.bandpass_low_hz, cfg.bandpass_high_hz);
    signal = &filtered;
  }

  const EchoProfile profile = build_echo_profile(*signal, cfg.chirp);
  if (profile.bins.rows() < cfg.acoustic_bins)
    raise(ErrorKind::InsufficientData,
          "features: echo profile has " + std::to_string(profile.bins.rows()) +
              " bins, need " + std::to_string(cfg.acoustic_bins));
  const DifferentialEchoProfile diff = differential_profile(profile);

  const std::size_t d = cfg.time_decimation;
  const std::size_t out_cols = diff.bins.cols() / d;
  if (out_cols == 0)
    raise(ErrorKind::InsufficientData,
          "features: window too short for the decimation factor");

  Matrix acoustic(cfg.acoustic_bins, out_cols);
  double sum_sq = 0.0;
  for (std::size_t r = 0; r < cfg.acoustic_bins; ++r) {
    for (std::size_t j = 0; j < out_cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += diff.bins.at(r, j * d + k);
      const double v = acc / static_cast<double>(d);
      acoustic.at(r, j) = v;
      sum_sq += v * v;
    }
  }
  const double rms = std::sqrt(
      sum_sq / static_cast<double>(cfg.acoustic_bins * out_cols));
  const double scale = 1.0 / std::max(rms, 1e-12);
  for (std::size_t r = 0; r < acoustic.rows(); ++r)
    for (std::size_t j = 0; j < out_cols; ++j) acoustic.at(r, j) *= scale;

  // Each feature frame averages differential columns [j*d, (j+1)*d); column
  // k's own midpoint is (k + 1) chirp periods into the stream, so the group
  // midpoint sits (j*d + (d - 1) / 2 + 1) periods in.
  const GyroStream normalized = normalize_gyro(gyro);
  std::vector<double> times(out_cols);
  for (std::size_t j = 0; j < out_cols; ++j)
    times[j] = audio.start_time +
               (static_cast<double>(j * d) +
                0.5 * static_cast<double>(d - 1) + 1.0) *
                   diff.frame_period;
  Matrix motion = sample_gyro_at(normalized, times);

  FusedWindow window;
  window.acoustic_feats = std::move(acoustic);
  window.motion_feats = std::move(motion);
  window.frame_period = diff.frame_period * static_cast<double>(d);
  validate(window);
  return window;
}

FusedWindow load_item_features(const std::string& corpus_root,
                               const ManifestItem& item,
                               const FeatureConfig& cfg) {
  SampleBuffer audio;
  audio.samples = read_audio(join_path(corpus_root, item.audio_path));
  audio.sample_rate = cfg.chirp.sample_rate;
  audio.start_time = 0.0;
  GyroStream gyro;
  gyro.samples = read_gyro(join_path(corpus_root, item.gyro_path));
  return extract_features(audio, gyro, cfg);
}

}  // namespace spellring
