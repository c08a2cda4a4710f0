#include "spellring/config.hpp"

#include <cstdlib>
#include <string>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::string section;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        raise(ErrorKind::Config, origin + ": line " + std::to_string(i + 1) +
                                     ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        raise(ErrorKind::Config, origin + ": line " + std::to_string(i + 1) +
                                     ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      raise(ErrorKind::Config, origin + ": line " + std::to_string(i + 1) +
                                   ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      raise(ErrorKind::Config,
            origin + ": line " + std::to_string(i + 1) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.values_[full] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  return parse(read_text_file(path), path);
}

bool Config::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    raise(ErrorKind::Config,
          origin_ + ": key '" + key + "' is not a number: " + it->second);
  return v;
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0' ||
      it->second.find('-') != std::string::npos)
    raise(ErrorKind::Config, origin_ + ": key '" + key +
                                 "' is not a non-negative integer: " +
                                 it->second);
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  raise(ErrorKind::Config,
        origin_ + ": key '" + key + "' is not a boolean: " + v);
}

std::string Config::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    raise(ErrorKind::Config, origin_ + ": missing required key '" + key + "'");
  return it->second;
}

}  // namespace spellring
