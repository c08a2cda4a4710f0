#include "spellring/acoustics.hpp"

#include <cmath>
#include <string>

#include "spellring/error.hpp"

namespace spellring {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// One direct-form-II-transposed biquad, run causally over the buffer.
void run_biquad(std::vector<float>& x, double b0, double b1, double b2,
                double a1, double a2) {
  double z1 = 0.0, z2 = 0.0;
  for (float& sample : x) {
    double in = sample;
    double out = b0 * in + z1;
    z1 = b1 * in - a1 * out + z2;
    z2 = b2 * in - a2 * out;
    sample = static_cast<float>(out);
  }
}

}  // namespace

std::size_t ChirpConfig::chirp_len_samples() const {
  return static_cast<std::size_t>(std::llround(sample_rate * chirp_duration));
}

void validate(const ChirpConfig& config) {
  if (!(config.sample_rate > 0.0))
    raise(ErrorKind::Config, "chirp sample_rate must be positive");
  if (!(config.chirp_duration > 0.0))
    raise(ErrorKind::Config, "chirp_duration must be positive");
  if (!(config.f_start < config.f_end))
    raise(ErrorKind::Config, "chirp f_start must be below f_end");
  if (config.f_end > config.sample_rate / 2.0)
    raise(ErrorKind::Config,
          "chirp f_end " + std::to_string(config.f_end) +
              " Hz exceeds Nyquist for sample_rate " +
              std::to_string(config.sample_rate));
  if (!(config.sound_speed > 0.0))
    raise(ErrorKind::Config, "sound_speed must be positive");
  if (config.chirp_len_samples() < 2)
    raise(ErrorKind::Config, "chirp shorter than 2 samples");
}

SampleBuffer make_chirp(const ChirpConfig& config) {
  validate(config);
  std::size_t n = config.chirp_len_samples();
  double T = config.chirp_duration;
  double slope = (config.f_end - config.f_start) / (2.0 * T);
  SampleBuffer out;
  out.sample_rate = config.sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / config.sample_rate;
    double phase = kTwoPi * (config.f_start * t + slope * t * t);
    out.samples[i] = static_cast<float>(std::sin(phase));
  }
  return out;
}

double max_range(const ChirpConfig& config) {
  validate(config);
  return config.sound_speed * config.chirp_duration / 2.0;
}

SampleBuffer cross_correlate(const SampleBuffer& received,
                             const SampleBuffer& tmpl) {
  if (received.sample_rate != tmpl.sample_rate)
    raise(ErrorKind::Format,
          "cross_correlate: sample rates differ (" +
              std::to_string(received.sample_rate) + " vs " +
              std::to_string(tmpl.sample_rate) + ")");
  if (tmpl.samples.empty())
    raise(ErrorKind::InvalidArgument, "cross_correlate: empty template");
  if (tmpl.samples.size() > received.samples.size())
    raise(ErrorKind::InvalidArgument,
          "cross_correlate: template longer than received buffer");

  std::size_t n = received.samples.size();
  std::size_t m = tmpl.samples.size();
  SampleBuffer out;
  out.sample_rate = received.sample_rate;
  out.start_time = received.start_time;
  out.samples.resize(n - m + 1);
  const float* r = received.samples.data();
  const float* t = tmpl.samples.data();
  for (std::size_t k = 0; k + m <= n; ++k) {
    // Accumulate in double: lags sum 100+ float products each.
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += double(r[k + i]) * double(t[i]);
    out.samples[k] = static_cast<float>(acc);
  }
  return out;
}

EchoProfile build_echo_profile(const SampleBuffer& received,
                               const ChirpConfig& config) {
  validate(config);
  std::size_t chirp_len = config.chirp_len_samples();
  if (received.samples.size() < 2 * chirp_len)
    raise(ErrorKind::InsufficientData,
          "build_echo_profile: need at least two chirp periods of samples, "
          "got " + std::to_string(received.samples.size()));
  if (received.sample_rate != config.sample_rate)
    raise(ErrorKind::Format,
          "build_echo_profile: buffer sample rate does not match config");

  SampleBuffer corr = cross_correlate(received, make_chirp(config));
  std::size_t frames = corr.samples.size() / chirp_len;

  EchoProfile profile;
  profile.bin_resolution = config.sound_speed / (2.0 * config.sample_rate);
  profile.frame_period = config.chirp_duration;
  profile.bins = Matrix(chirp_len, frames);
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t b = 0; b < chirp_len; ++b)
      profile.bins.at(b, f) = std::fabs(double(corr.samples[f * chirp_len + b]));
  return profile;
}

DifferentialEchoProfile differential_profile(const EchoProfile& profile) {
  std::size_t frames = profile.bins.cols();
  if (frames < 2)
    raise(ErrorKind::InsufficientData,
          "differential_profile: need at least 2 frames, got " +
              std::to_string(frames));
  DifferentialEchoProfile diff;
  diff.bin_resolution = profile.bin_resolution;
  diff.frame_period = profile.frame_period;
  diff.bins = Matrix(profile.bins.rows(), frames - 1);
  for (std::size_t b = 0; b < profile.bins.rows(); ++b)
    for (std::size_t f = 0; f + 1 < frames; ++f)
      diff.bins.at(b, f) = profile.bins.at(b, f + 1) - profile.bins.at(b, f);
  return diff;
}

SampleBuffer band_pass(const SampleBuffer& in, double low_hz, double high_hz) {
  if (in.sample_rate <= 0.0)
    raise(ErrorKind::InvalidArgument, "band_pass: buffer has no sample rate");
  if (!(low_hz > 0.0) || !(high_hz > low_hz))
    raise(ErrorKind::InvalidArgument, "band_pass: need 0 < low < high");
  double nyquist = in.sample_rate / 2.0;
  // The bilinear transform blows up at Nyquist; an edge at or above it just
  // means "no upper cut", so park it slightly below.
  double hi = std::min(high_hz, 0.998 * nyquist);

  SampleBuffer out = in;
  const double q = 0.70710678118654752440;  // Butterworth

  {  // 2nd-order high-pass at low_hz (RBJ cookbook form).
    double w0 = kTwoPi * low_hz / in.sample_rate;
    double alpha = std::sin(w0) / (2.0 * q);
    double c = std::cos(w0);
    double a0 = 1.0 + alpha;
    run_biquad(out.samples, (1.0 + c) / 2.0 / a0, -(1.0 + c) / a0,
               (1.0 + c) / 2.0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0);
  }
  {  // 2nd-order low-pass at hi.
    double w0 = kTwoPi * hi / in.sample_rate;
    double alpha = std::sin(w0) / (2.0 * q);
    double c = std::cos(w0);
    double a0 = 1.0 + alpha;
    run_biquad(out.samples, (1.0 - c) / 2.0 / a0, (1.0 - c) / a0,
               (1.0 - c) / 2.0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0);
  }
  return out;
}

}  // namespace spellring
