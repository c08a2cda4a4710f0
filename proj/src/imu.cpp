#include "spellring/imu.hpp"

#include <cmath>
#include <string>

#include "spellring/error.hpp"

namespace spellring {

namespace {

double lerp_axis(const std::vector<GyroSample>& s, std::size_t i, double t,
                 double GyroSample::*axis) {
  // i is the left neighbour: s[i].t <= t <= s[i+1].t.
  double span = s[i + 1].t - s[i].t;
  double w = span > 0.0 ? (t - s[i].t) / span : 0.0;
  return s[i].*axis + w * (s[i + 1].*axis - s[i].*axis);
}

}  // namespace

void validate(const GyroStream& stream) {
  for (std::size_t i = 0; i < stream.samples.size(); ++i) {
    const GyroSample& s = stream.samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.y) ||
        !std::isfinite(s.z))
      raise(ErrorKind::Data,
            "gyro sample " + std::to_string(i) + " is not finite");
    if (i > 0 && !(s.t > stream.samples[i - 1].t))
      raise(ErrorKind::Data,
            "gyro timestamps not strictly increasing at sample " +
                std::to_string(i));
  }
}

GyroStream normalize_gyro(const GyroStream& stream) {
  if (stream.samples.size() < 2)
    raise(ErrorKind::InsufficientData,
          "normalize_gyro: need at least 2 samples, got " +
              std::to_string(stream.samples.size()));
  validate(stream);

  const std::size_t n = stream.samples.size();
  double mean[3] = {0, 0, 0};
  for (const GyroSample& s : stream.samples) {
    mean[0] += s.x;
    mean[1] += s.y;
    mean[2] += s.z;
  }
  for (double& m : mean) m /= double(n);

  double var[3] = {0, 0, 0};
  for (const GyroSample& s : stream.samples) {
    var[0] += (s.x - mean[0]) * (s.x - mean[0]);
    var[1] += (s.y - mean[1]) * (s.y - mean[1]);
    var[2] += (s.z - mean[2]) * (s.z - mean[2]);
  }
  // Population std: the [0,2] -> [-1,1] behaviour depends on dividing by n.
  double std_[3];
  for (int a = 0; a < 3; ++a) std_[a] = std::sqrt(var[a] / double(n));

  GyroStream out = stream;
  for (GyroSample& s : out.samples) {
    s.x = std_[0] < 1e-9 ? 0.0 : (s.x - mean[0]) / std_[0];
    s.y = std_[1] < 1e-9 ? 0.0 : (s.y - mean[1]) / std_[1];
    s.z = std_[2] < 1e-9 ? 0.0 : (s.z - mean[2]) / std_[2];
  }
  return out;
}

GyroStream resample(const GyroStream& stream, double target_rate) {
  if (!(target_rate > 0.0))
    raise(ErrorKind::InvalidArgument, "resample: target_rate must be positive");
  if (stream.samples.size() < 2)
    raise(ErrorKind::InsufficientData,
          "resample: need at least 2 samples, got " +
              std::to_string(stream.samples.size()));
  validate(stream);

  double first = stream.samples.front().t;
  double last = stream.samples.back().t;
  std::size_t count =
      static_cast<std::size_t>(std::floor((last - first) * target_rate)) + 1;

  std::vector<double> times(count);
  for (std::size_t i = 0; i < count; ++i)
    times[i] = first + double(i) / target_rate;

  Matrix cols = sample_gyro_at(stream, times);
  GyroStream out;
  out.nominal_rate = target_rate;
  out.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.samples[i].t = times[i];
    out.samples[i].x = cols.at(0, i);
    out.samples[i].y = cols.at(1, i);
    out.samples[i].z = cols.at(2, i);
  }
  return out;
}

Matrix sample_gyro_at(const GyroStream& stream,
                      const std::vector<double>& times) {
  if (stream.samples.size() < 2)
    raise(ErrorKind::InsufficientData,
          "gyro alignment: need at least 2 samples");
  const auto& s = stream.samples;
  double lo = s.front().t;
  double hi = s.back().t;
  for (double t : times)
    if (t < lo || t > hi)
      raise(ErrorKind::Alignment,
            "gyro does not cover requested time " + std::to_string(t) +
                " s (covered span " + std::to_string(lo) + " .. " +
                std::to_string(hi) + " s)");

  Matrix out(3, times.size());
  std::size_t i = 0;
  for (std::size_t c = 0; c < times.size(); ++c) {
    double t = times[c];
    // Times are ascending in every caller; the scan below still copes with
    // arbitrary order by only ever moving the cursor forward from a reset.
    if (t < s[i].t) i = 0;
    while (i + 2 < s.size() && s[i + 1].t < t) ++i;
    out.at(0, c) = lerp_axis(s, i, t, &GyroSample::x);
    out.at(1, c) = lerp_axis(s, i, t, &GyroSample::y);
    out.at(2, c) = lerp_axis(s, i, t, &GyroSample::z);
  }
  return out;
}

AlignedStreams synchronize(const DifferentialEchoProfile& profile,
                           const GyroStream& stream,
                           double profile_start_time) {
  if (profile.bins.cols() == 0)
    raise(ErrorKind::InsufficientData, "synchronize: empty profile");
  validate(stream);

  // Column j of the differential profile spans frames j and j+1; use the
  // midpoint of that span as its timestamp.
  std::vector<double> times(profile.bins.cols());
  for (std::size_t j = 0; j < times.size(); ++j)
    times[j] = profile_start_time + (double(j) + 1.0) * profile.frame_period;

  AlignedStreams aligned;
  aligned.acoustic = profile;
  aligned.motion = sample_gyro_at(stream, times);
  aligned.frame_times = std::move(times);
  return aligned;
}

}  // namespace spellring
