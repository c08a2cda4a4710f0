#ifndef SPELLRING_CONFIG_HPP
#define SPELLRING_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

namespace spellring {

// Minimal key=value configuration with [section] headers and '#' comments.
// Keys inside a section are addressed as "section.key".
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text, const std::string& origin);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;

  // Typed getters with defaults; a present-but-malformed value is an error.
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Getter that insists the key exists.
  std::string require(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const {
    return values_;
  }

  // The path (or label) this config was parsed from; relative paths inside
  // the file resolve against its directory.
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace spellring

#endif
