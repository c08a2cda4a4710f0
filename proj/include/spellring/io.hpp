#ifndef SPELLRING_IO_HPP
#define SPELLRING_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace spellring {

// A gyroscope sample: time in seconds plus angular velocity (rad/s) about
// the x, y, z axes of the ring.
struct GyroSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Audio files are headerless little-endian float32, mono.
std::vector<float> read_audio(const std::string& path);
void write_audio(const std::string& path, const std::vector<float>& samples);

// Gyro files are text, one "timestamp,x,y,z" line per sample.
std::vector<GyroSample> read_gyro(const std::string& path);
void write_gyro(const std::string& path, const std::vector<GyroSample>& samples);

// Whole-file text helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Splits on '\n', dropping a trailing '\r' on each line and a final empty
// line caused by a terminating newline.
std::vector<std::string> split_lines(const std::string& text);

std::vector<std::string> split_whitespace(const std::string& line);

void ensure_directory(const std::string& path);

}  // namespace spellring

#endif
