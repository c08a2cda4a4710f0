#ifndef SPELLRING_IMU_HPP
#define SPELLRING_IMU_HPP

#include <vector>

#include "spellring/acoustics.hpp"
#include "spellring/io.hpp"
#include "spellring/matrix.hpp"

namespace spellring {

// Timestamped tri-axial angular velocity.
struct GyroStream {
  std::vector<GyroSample> samples;
  double nominal_rate = 150.0;  // Hz
};

// Acoustic differential profile plus one gyro column per acoustic column.
struct AlignedStreams {
  DifferentialEchoProfile acoustic;
  Matrix motion;                   // [3 x frames]
  std::vector<double> frame_times; // seconds, one per column
};

// Throws when timestamps are not strictly increasing or values non-finite.
void validate(const GyroStream& stream);

// Per-axis z-score over the whole stream; axes with std below 1e-9 map to
// zeros. Statistics are computed per call, i.e. per session.
GyroStream normalize_gyro(const GyroStream& stream);

// Linear interpolation onto a uniform grid over [first, last] timestamp;
// output length = floor((last - first) * target_rate) + 1.
GyroStream resample(const GyroStream& stream, double target_rate);

// Interpolate the gyro at each acoustic frame's midpoint. The gyro must
// cover the whole frame-time span; gaps are an alignment error.
AlignedStreams synchronize(const DifferentialEchoProfile& profile,
                           const GyroStream& stream,
                           double profile_start_time = 0.0);

// Shared low-level alignment: one interpolated (x,y,z) column per requested
// time. Used by synchronize() and by the feature pipeline after decimation.
Matrix sample_gyro_at(const GyroStream& stream,
                      const std::vector<double>& times);

}  // namespace spellring

#endif
