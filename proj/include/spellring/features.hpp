#ifndef SPELLRING_FEATURES_HPP
#define SPELLRING_FEATURES_HPP

#include <cstddef>
#include <string>

#include "spellring/acoustics.hpp"
#include "spellring/imu.hpp"
#include "spellring/manifest.hpp"
#include "spellring/model.hpp"

namespace spellring {

// Raw streams -> model input. Acoustic path: optional band-pass around the
// chirp band, echo profile, column differences, crop to the near-range bins,
// average groups of time_decimation columns, then scale to unit RMS. Motion
// path: per-stream z-score, sampled at each decimated column's midpoint.
struct FeatureConfig {
  ChirpConfig chirp;
  std::size_t acoustic_bins = 48;    // near-range crop (rows kept)
  std::size_t time_decimation = 4;   // differential columns per feature frame
  bool bandpass = true;
  double bandpass_low_hz = 19000.0;
  double bandpass_high_hz = 25000.0;  // clamped below Nyquist by the filter
};

void validate(const FeatureConfig& cfg);

FusedWindow extract_features(const SampleBuffer& audio,
                             const GyroStream& gyro,
                             const FeatureConfig& cfg);

// Reads one manifest item's files (paths resolved against corpus_root) and
// extracts its window.
FusedWindow load_item_features(const std::string& corpus_root,
                               const ManifestItem& item,
                               const FeatureConfig& cfg);

}  // namespace spellring

#endif
