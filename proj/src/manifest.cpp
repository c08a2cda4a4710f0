#include "spellring/manifest.hpp"

#include <cstdlib>
#include <string>
#include <vector>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

constexpr const char* kManifestHeader =
    "id\tword\taudio\tgyro\tstart_time\tletters_per_second";
constexpr const char* kCorpusHeader = "session\tmanifest";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_number(const std::string& text, const std::string& path,
                    const std::string& field) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    raise(ErrorKind::Format,
          path + ": bad " + field + " value '" + text + "'");
  return value;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_manifest(const std::string& path,
                    const std::vector<ManifestItem>& items) {
  std::string out = kManifestHeader;
  out += '\n';
  for (const ManifestItem& item : items) {
    out += item.id + '\t' + item.word + '\t' + item.audio_path + '\t' +
           item.gyro_path + '\t' + fmt(item.start_time) + '\t' +
           fmt(item.letters_per_second) + '\n';
  }
  write_text_file(path, out);
}

std::vector<ManifestItem> read_manifest(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  if (lines.empty() || lines.front() != kManifestHeader)
    raise(ErrorKind::Format, path + ": missing manifest header");
  std::vector<ManifestItem> items;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_tabs(lines[i]);
    if (f.size() != 6)
      raise(ErrorKind::Format, path + ": line " + std::to_string(i + 1) +
                                   " has " + std::to_string(f.size()) +
                                   " fields, expected 6");
    ManifestItem item;
    item.id = f[0];
    item.word = f[1];
    item.audio_path = f[2];
    item.gyro_path = f[3];
    item.start_time = parse_number(f[4], path, "start_time");
    item.letters_per_second = parse_number(f[5], path, "letters_per_second");
    if (item.id.empty() || item.word.empty())
      raise(ErrorKind::Format,
            path + ": line " + std::to_string(i + 1) + " has an empty field");
    items.push_back(item);
  }
  return items;
}

void write_corpus_index(const std::string& path,
                        const std::vector<SessionRef>& sessions) {
  std::string out = kCorpusHeader;
  out += '\n';
  for (const SessionRef& s : sessions)
    out += s.id + '\t' + s.manifest_path + '\n';
  write_text_file(path, out);
}

std::vector<SessionRef> read_corpus_index(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  if (lines.empty() || lines.front() != kCorpusHeader)
    raise(ErrorKind::Format, path + ": missing corpus header");
  std::vector<SessionRef> sessions;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_tabs(lines[i]);
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      raise(ErrorKind::Format,
            path + ": line " + std::to_string(i + 1) + " is not 'id<TAB>path'");
    sessions.push_back(SessionRef{f[0], f[1]});
  }
  if (sessions.empty()) raise(ErrorKind::Data, path + ": no sessions listed");
  return sessions;
}

std::string join_path(const std::string& base, const std::string& rel) {
  if (rel.empty()) return base;
  if (rel.front() == '/') return rel;
  if (base.empty()) return rel;
  if (base.back() == '/') return base + rel;
  return base + "/" + rel;
}

std::string parent_dir(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  if (slash == 0) return "/";
  return path.substr(0, slash);
}

}  // namespace spellring
