#include "spellring/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spellring/error.hpp"

namespace spellring {

namespace {

// The on-disk sample format is little-endian float32. On big-endian hosts we
// would need byte swaps here; all supported targets are little-endian, which
// the static_assert below is a cheap stand-in for.
static_assert(sizeof(float) == 4, "float must be 32-bit");

}  // namespace

std::vector<float> read_audio(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open audio file: " + path);
  in.seekg(0, std::ios::end);
  std::streamoff bytes = in.tellg();
  in.seekg(0, std::ios::beg);
  if (bytes < 0) raise(ErrorKind::Io, "cannot stat audio file: " + path);
  if (bytes % 4 != 0)
    raise(ErrorKind::Format,
          "audio file size is not a multiple of 4 bytes: " + path);
  std::vector<float> samples(static_cast<std::size_t>(bytes) / 4);
  if (!samples.empty()) {
    in.read(reinterpret_cast<char*>(samples.data()), bytes);
    if (!in) raise(ErrorKind::Io, "short read on audio file: " + path);
  }
  return samples;
}

void write_audio(const std::string& path, const std::vector<float>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot open audio file for write: " + path);
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size() * 4));
  if (!out) raise(ErrorKind::Io, "short write on audio file: " + path);
}

std::vector<GyroSample> read_gyro(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open gyro file: " + path);
  std::vector<GyroSample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    GyroSample s;
    char trailing = 0;
    int got = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf %c", &s.t, &s.x,
                          &s.y, &s.z, &trailing);
    if (got != 4)
      raise(ErrorKind::Format, "bad gyro line " + std::to_string(lineno) +
                                   " in " + path + ": " + line);
    samples.push_back(s);
  }
  return samples;
}

void write_gyro(const std::string& path,
                const std::vector<GyroSample>& samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot open gyro file for write: " + path);
  char buf[128];
  for (const GyroSample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", s.t, s.x, s.y,
                  s.z);
    out << buf;
  }
  if (!out) raise(ErrorKind::Io, "short write on gyro file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot open file for write: " + path);
  out << content;
  if (!out) raise(ErrorKind::Io, "short write on file: " + path);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    raise(ErrorKind::Io, "cannot create directory " + path + ": " + ec.message());
}

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Config: return "config";
    case ErrorKind::Format: return "format";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::InfeasibleAlignment: return "infeasible_alignment";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Data: return "data";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace spellring
