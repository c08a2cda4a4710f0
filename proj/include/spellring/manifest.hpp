#ifndef SPELLRING_MANIFEST_HPP
#define SPELLRING_MANIFEST_HPP

#include <string>
#include <vector>

namespace spellring {

// One labeled recording. Paths are relative to the corpus root directory.
struct ManifestItem {
  std::string id;
  std::string word;
  std::string audio_path;
  std::string gyro_path;
  double start_time = 0.0;         // seconds into the session
  double letters_per_second = 0.0; // session signing speed
};

// Tab-separated manifest: a header line, then one row per item.
void write_manifest(const std::string& path,
                    const std::vector<ManifestItem>& items);
std::vector<ManifestItem> read_manifest(const std::string& path);

// A corpus is a set of session manifests under one root.
struct SessionRef {
  std::string id;
  std::string manifest_path;  // relative to the corpus root
};

void write_corpus_index(const std::string& path,
                        const std::vector<SessionRef>& sessions);
std::vector<SessionRef> read_corpus_index(const std::string& path);

// "a/b" + "c" -> "a/b/c"; absolute rhs wins.
std::string join_path(const std::string& base, const std::string& rel);

// Directory part of a path ("." when there is none).
std::string parent_dir(const std::string& path);

}  // namespace spellring

#endif
