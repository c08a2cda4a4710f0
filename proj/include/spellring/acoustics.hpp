#ifndef SPELLRING_ACOUSTICS_HPP
#define SPELLRING_ACOUSTICS_HPP

#include <cstddef>
#include <vector>

#include "spellring/matrix.hpp"

namespace spellring {

// Parameters of the transmitted linear up-chirp.
struct ChirpConfig {
  double f_start = 20000.0;       // Hz
  double f_end = 24000.0;         // Hz
  double sample_rate = 50000.0;   // Hz
  double chirp_duration = 0.002;  // seconds
  double sound_speed = 343.0;     // m/s

  std::size_t chirp_len_samples() const;
};

// Throws a config error when the invariants don't hold (Nyquist violation,
// non-positive duration, chirp shorter than 2 samples).
void validate(const ChirpConfig& config);

// Raw mono sample stream.
struct SampleBuffer {
  std::vector<float> samples;
  double sample_rate = 0.0;
  double start_time = 0.0;
};

// Correlation magnitudes, one column per chirp frame.
// bins is [range_bins x frames]; range_bins == chirp_len_samples.
struct EchoProfile {
  Matrix bins;
  double bin_resolution = 0.0;  // meters per bin
  double frame_period = 0.0;    // seconds per column
};

// Column-wise first difference of an EchoProfile: [range_bins x (frames-1)],
// signed. Static scenes difference to zero.
struct DifferentialEchoProfile {
  Matrix bins;
  double bin_resolution = 0.0;
  double frame_period = 0.0;
};

// Linear up-chirp s[n] = sin(2*pi*(f_start*t + (f_end-f_start)*t^2/(2T))),
// t = n / sample_rate, length round(sample_rate * T).
SampleBuffer make_chirp(const ChirpConfig& config);

// One-chirp round-trip range: sound_speed * chirp_duration / 2.
double max_range(const ChirpConfig& config);

// Valid-mode sliding dot product: c[k] = sum_n received[n+k] * tmpl[n],
// k in [0, len(received) - len(tmpl)]. Requires equal sample rates and
// template no longer than the received buffer.
SampleBuffer cross_correlate(const SampleBuffer& received,
                             const SampleBuffer& tmpl);

// Absolute cross-correlation with the transmit chirp, sliced into
// consecutive frames of chirp_len_samples bins (no overlap).
EchoProfile build_echo_profile(const SampleBuffer& received,
                               const ChirpConfig& config);

DifferentialEchoProfile differential_profile(const EchoProfile& profile);

// Causal band-pass: 2nd-order high-pass at low_hz followed by 2nd-order
// low-pass at high_hz (Butterworth Q), i.e. a 4th-order-equivalent cascade.
// An upper edge at or above Nyquist is clamped just below it, where the
// low-pass stage is effectively transparent.
SampleBuffer band_pass(const SampleBuffer& in, double low_hz, double high_hz);

}  // namespace spellring

#endif
