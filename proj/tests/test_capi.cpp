#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/stat.h>
#include <unistd.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "spellring.h"

namespace {

std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  std::string dir = "/tmp/spellring_capi_" + tag + "_" +
                    std::to_string(counter++) + "_" +
                    std::to_string(::getpid());
  ::mkdir(dir.c_str(), 0755);
  return dir;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool file_exists(const std::string& path) {
  struct stat st{};
  return ::stat(path.c_str(), &st) == 0;
}

// Owns a char* handed out by the library.
struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { sr_string_free(ptr); }
  std::string str() const { return ptr == nullptr ? std::string() : ptr; }
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) fields.push_back(field);
  return fields;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

struct FirstItem {
  std::string id;
  std::string word;
  std::string audio_rel;  // relative to the corpus root
};

// The first data row of the first session manifest.
FirstItem first_item(const std::string& corpus_root) {
  const std::string index = read_file(corpus_root + "/corpus.tsv");
  const std::vector<std::string> index_lines = split_lines(index);
  REQUIRE(index_lines.size() >= 2);  // header + at least one session
  const std::string manifest_rel = split_tabs(index_lines[1]).at(1);
  const std::string manifest = read_file(corpus_root + "/" + manifest_rel);
  const std::vector<std::string> rows = split_lines(manifest);
  REQUIRE(rows.size() >= 2);
  const std::vector<std::string> fields = split_tabs(rows[1]);
  REQUIRE(fields.size() == 6);
  return {fields[0], fields[1], fields[2]};
}

// A corpus + pipeline configuration small enough to train in seconds.
std::string write_project(const std::string& dir, const std::string& kind) {
  write_file(dir + "/words.txt", "ab\ncd\n");
  write_file(dir + "/phrases.txt", "ab cd\ncd ab\nab ab cd\n");
  const std::string cfg_path = dir + "/" + kind + ".cfg";
  write_file(cfg_path,
             "[simulate]\n"
             "kind = " + kind + "\n"
             "[synth]\n"
             "letters_per_second = 4\n"
             "noise_snr_db = 25\n"
             "speed_jitter = 0\n"
             "coarticulation = 0.15\n"
             "sessions = 3\n"
             "seed = 11\n"
             "[train]\n"
             "epochs = 6\n"
             "learning_rate = 0.003\n"
             "batch_size = 4\n"
             "max_concat_words = 1\n"
             "dropout = 0\n"
             "pad_fraction = 0.1\n"
             "noise_std = 0.01\n"
             "seed = 5\n"
             "[pipeline]\n"
             "top_n = 3\n"
             "beam_width = 8\n"
             "[paths]\n"
             "dictionary = words.txt\n"
             "phrases = phrases.txt\n");
  return cfg_path;
}

}  // namespace

TEST_CASE("status names cover every code") {
  CHECK(std::string(sr_status_name(SR_OK)) == "ok");
  CHECK(std::string(sr_status_name(SR_ERR_INVALID_ARGUMENT)) ==
        "invalid_argument");
  CHECK(std::string(sr_status_name(SR_ERR_CONFIG)) == "config");
  CHECK(std::string(sr_status_name(SR_ERR_FORMAT)) == "format");
  CHECK(std::string(sr_status_name(SR_ERR_INSUFFICIENT_DATA)) ==
        "insufficient_data");
  CHECK(std::string(sr_status_name(SR_ERR_ALIGNMENT)) == "alignment");
  CHECK(std::string(sr_status_name(SR_ERR_INFEASIBLE_ALIGNMENT)) ==
        "infeasible_alignment");
  CHECK(std::string(sr_status_name(SR_ERR_NUMERIC)) == "numeric");
  CHECK(std::string(sr_status_name(SR_ERR_DATA)) == "data");
  CHECK(std::string(sr_status_name(SR_ERR_IO)) == "io");
  CHECK(std::string(sr_status_name(SR_ERR_UNKNOWN)) == "unknown");
  CHECK(std::string(sr_version()).size() > 0);
}

TEST_CASE("null arguments are rejected and the error message is readable") {
  size_t dist = 0;
  CHECK(sr_levenshtein(nullptr, "b", &dist) == SR_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sr_last_error()).size() > 0);
  CHECK(sr_levenshtein("a", "b", nullptr) == SR_ERR_INVALID_ARGUMENT);

  // A successful call clears the sticky message.
  CHECK(sr_levenshtein("a", "b", &dist) == SR_OK);
  CHECK(std::string(sr_last_error()).empty());
  CHECK(dist == 1);
}

TEST_CASE("edit distance and error rates match known values") {
  size_t dist = 0;
  REQUIRE(sr_levenshtein("hello", "helo", &dist) == SR_OK);
  CHECK(dist == 1);
  REQUIRE(sr_levenshtein("kitten", "sitting", &dist) == SR_OK);
  CHECK(dist == 3);

  double rate = -1.0;
  REQUIRE(sr_ler("hello", "helo", &rate) == SR_OK);
  CHECK(rate == doctest::Approx(0.2));

  REQUIRE(sr_wer("the cat sat", "the cat mat", &rate) == SR_OK);
  CHECK(rate == doctest::Approx(1.0 / 3.0));
  REQUIRE(sr_wer("the cat sat", "the cat sat", &rate) == SR_OK);
  CHECK(rate == doctest::Approx(0.0));
}

TEST_CASE("echo range helper validates its inputs") {
  double range = 0.0;
  REQUIRE(sr_max_range_m(343.0, 0.012, &range) == SR_OK);
  CHECK(range == doctest::Approx(2.058));

  CHECK(sr_max_range_m(343.0, -1.0, &range) != SR_OK);
  CHECK(std::string(sr_last_error()).size() > 0);
}

TEST_CASE("dictionary corrections come back as tab-separated lines") {
  const std::string dir = temp_dir("dict");
  write_file(dir + "/words.txt", "fax\ntax\nfox\nbox\n");

  sr_dictionary* dict = nullptr;
  REQUIRE(sr_dictionary_load((dir + "/words.txt").c_str(), &dict) == SR_OK);
  size_t size = 0;
  REQUIRE(sr_dictionary_size(dict, &size) == SR_OK);
  CHECK(size == 4);

  OwnedString lines;
  REQUIRE(sr_correct(dict, "aax", 3, &lines.ptr) == SR_OK);
  const std::vector<std::string> rows = split_lines(lines.str());
  REQUIRE(rows.size() == 3);

  double prev_similarity = 2.0;
  for (const std::string& row : rows) {
    const std::vector<std::string> fields = split_tabs(row);
    REQUIRE(fields.size() == 3);
    const double similarity = std::stod(fields[2]);
    CHECK(similarity <= prev_similarity);
    CHECK(similarity >= 0.0);
    CHECK(similarity <= 1.0);
    prev_similarity = similarity;
  }
  CHECK(split_tabs(rows[0])[0] == "fax");
  CHECK(split_tabs(rows[1])[0] == "tax");
  // box and fox are both one further away; ties resolve alphabetically.
  CHECK(split_tabs(rows[2])[0] == "box");
  CHECK(split_tabs(rows[2])[1] == "2");

  sr_dictionary_free(dict);

  sr_dictionary* missing = nullptr;
  CHECK(sr_dictionary_load((dir + "/absent.txt").c_str(), &missing) ==
        SR_ERR_IO);
  CHECK(missing == nullptr);
}

TEST_CASE("phrase model scores seen orders above unseen ones") {
  const std::string dir = temp_dir("lm");
  write_file(dir + "/phrases.txt", "the cat sat\nthe cat ran\nthe dog sat\n");

  sr_ngram* lm = nullptr;
  REQUIRE(sr_ngram_fit((dir + "/phrases.txt").c_str(), 0.25, &lm) == SR_OK);

  double seen = 0.0;
  double unseen = 0.0;
  REQUIRE(sr_ngram_score(lm, "the cat sat", &seen) == SR_OK);
  REQUIRE(sr_ngram_score(lm, "sat cat the", &unseen) == SR_OK);
  CHECK(std::isfinite(seen));
  CHECK(std::isfinite(unseen));
  CHECK(seen > unseen);
  sr_ngram_free(lm);
}

TEST_CASE("simulate, train, evaluate, and decode through the C interface") {
  const std::string dir = temp_dir("e2e");
  const std::string cfg = write_project(dir, "words");
  const std::string corpus = dir + "/corpus";

  OwnedString sim_summary;
  REQUIRE(sr_simulate(cfg.c_str(), 0, 0, corpus.c_str(), &sim_summary.ptr) ==
          SR_OK);
  CHECK(contains(sim_summary.str(), "kind=words"));
  CHECK(contains(sim_summary.str(), "sessions=3"));
  CHECK(contains(sim_summary.str(), "items=6"));
  REQUIRE(file_exists(corpus + "/corpus.tsv"));

  SUBCASE("the same seed reproduces the corpus byte for byte") {
    const std::string again = dir + "/corpus_again";
    OwnedString summary;
    REQUIRE(sr_simulate(cfg.c_str(), 0, 0, again.c_str(), &summary.ptr) ==
            SR_OK);
    CHECK(read_file(corpus + "/corpus.tsv") ==
          read_file(again + "/corpus.tsv"));
    const FirstItem item = first_item(corpus);
    CHECK(read_file(corpus + "/session_00/manifest.tsv") ==
          read_file(again + "/session_00/manifest.tsv"));
    CHECK(read_file(corpus + "/" + item.audio_rel) ==
          read_file(again + "/" + item.audio_rel));
  }

  SUBCASE("an explicit seed overrides the configured one") {
    const std::string other = dir + "/corpus_seeded";
    OwnedString summary;
    REQUIRE(sr_simulate(cfg.c_str(), 1, 99, other.c_str(), &summary.ptr) ==
            SR_OK);
    const FirstItem item = first_item(corpus);
    CHECK(read_file(corpus + "/" + item.audio_rel) !=
          read_file(other + "/" + item.audio_rel));
  }

  SUBCASE("training produces a loadable checkpoint and evaluation reports") {
    const std::string model_path = dir + "/model.bin";
    OwnedString train_summary;
    REQUIRE(sr_train(cfg.c_str(), 0, 0, corpus.c_str(), model_path.c_str(),
                     &train_summary.ptr) == SR_OK);
    CHECK(contains(train_summary.str(), "epochs=6"));
    CHECK(contains(train_summary.str(), "best_heldout="));
    REQUIRE(file_exists(model_path));

    sr_model* model = nullptr;
    REQUIRE(sr_model_load(model_path.c_str(), &model) == SR_OK);
    OwnedString modality;
    REQUIRE(sr_model_modality(model, &modality.ptr) == SR_OK);
    CHECK(modality.str() == "fusion");

    const std::string copy_path = dir + "/model_copy.bin";
    REQUIRE(sr_model_save(model, copy_path.c_str()) == SR_OK);
    CHECK(read_file(model_path) == read_file(copy_path));
    sr_model_free(model);

    const std::string report_path = dir + "/report.tsv";
    OwnedString eval_summary;
    REQUIRE(sr_eval_words(cfg.c_str(), corpus.c_str(), model_path.c_str(),
                          report_path.c_str(), &eval_summary.ptr) == SR_OK);
    CHECK(contains(eval_summary.str(), "items=6"));
    CHECK(contains(eval_summary.str(), " ler="));
    CHECK(contains(eval_summary.str(), " wpm="));
    CHECK(file_exists(report_path));

    const FirstItem item = first_item(corpus);
    OwnedString detail;
    OwnedString decode_summary;
    REQUIRE(sr_decode(cfg.c_str(), corpus.c_str(), model_path.c_str(),
                      item.id.c_str(), &detail.ptr,
                      &decode_summary.ptr) == SR_OK);
    const std::vector<std::string> lines = split_lines(detail.str());
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0].rfind("raw", 0) == 0);
    CHECK(lines[1].rfind("corrected ", 0) == 0);
    for (std::size_t i = 2; i < lines.size(); ++i)
      CHECK(lines[i].rfind("candidate ", 0) == 0);
    CHECK(lines.size() <= 2 + 5);
    CHECK(contains(decode_summary.str(), "item=" + item.id));
    CHECK(contains(decode_summary.str(), "truth=" + item.word));

    OwnedString missing;
    OwnedString missing_summary;
    CHECK(sr_decode(cfg.c_str(), corpus.c_str(), model_path.c_str(),
                    "no_such_item", &missing.ptr,
                    &missing_summary.ptr) == SR_ERR_DATA);
  }

  SUBCASE("feature tables list every item or a single requested one") {
    const std::string feat_dir = dir + "/features";
    OwnedString summary;
    REQUIRE(sr_features(cfg.c_str(), corpus.c_str(), nullptr,
                        feat_dir.c_str(), &summary.ptr) == SR_OK);
    CHECK(contains(summary.str(), "items=6"));
    const std::vector<std::string> rows =
        split_lines(read_file(feat_dir + "/features.tsv"));
    REQUIRE(rows.size() == 7);  // header + six items
    CHECK(split_tabs(rows[0]).size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const std::vector<std::string> fields = split_tabs(rows[i]);
      REQUIRE(fields.size() == 5);
      CHECK(std::stoul(fields[2]) > 0);   // frames
      CHECK(std::stoul(fields[3]) == 48);  // acoustic bins
    }

    const FirstItem item = first_item(corpus);
    OwnedString one_summary;
    REQUIRE(sr_features(cfg.c_str(), corpus.c_str(), item.id.c_str(),
                        (dir + "/features_one").c_str(),
                        &one_summary.ptr) == SR_OK);
    CHECK(contains(one_summary.str(), "items=1"));

    OwnedString bogus;
    CHECK(sr_features(cfg.c_str(), corpus.c_str(), "zzz",
                      (dir + "/features_bogus").c_str(),
                      &bogus.ptr) == SR_ERR_DATA);
  }
}

TEST_CASE("phrase synthesis and rescored evaluation run end to end") {
  const std::string dir = temp_dir("phrase");
  const std::string words_cfg = write_project(dir, "words");
  const std::string phrase_cfg = write_project(dir, "phrases");

  const std::string corpus = dir + "/word_corpus";
  OwnedString sim_summary;
  REQUIRE(sr_simulate(words_cfg.c_str(), 0, 0, corpus.c_str(),
                      &sim_summary.ptr) == SR_OK);
  const std::string model_path = dir + "/model.bin";
  OwnedString train_summary;
  REQUIRE(sr_train(words_cfg.c_str(), 0, 0, corpus.c_str(),
                   model_path.c_str(), &train_summary.ptr) == SR_OK);

  const std::string phrase_corpus = dir + "/phrase_corpus";
  OwnedString phrase_summary;
  REQUIRE(sr_simulate(phrase_cfg.c_str(), 0, 0, phrase_corpus.c_str(),
                      &phrase_summary.ptr) == SR_OK);
  CHECK(contains(phrase_summary.str(), "kind=phrases"));
  CHECK(contains(phrase_summary.str(), "phrases=3"));
  REQUIRE(file_exists(phrase_corpus + "/phrases.txt"));

  const std::string report_path = dir + "/phrase_report.tsv";
  OwnedString eval_summary;
  REQUIRE(sr_eval_phrases(phrase_cfg.c_str(), phrase_corpus.c_str(),
                          model_path.c_str(), report_path.c_str(),
                          &eval_summary.ptr) == SR_OK);
  CHECK(contains(eval_summary.str(), "phrases=3"));
  CHECK(contains(eval_summary.str(), " wer="));
  CHECK(contains(eval_summary.str(), " wer_nolm="));
  CHECK(file_exists(report_path));
  CHECK(file_exists(report_path + ".nolm"));
}

TEST_CASE("configuration problems surface as mapped statuses") {
  OwnedString summary;
  CHECK(sr_simulate("/tmp/definitely_missing.cfg", 0, 0, "/tmp/x",
                    &summary.ptr) == SR_ERR_IO);
  CHECK(std::string(sr_last_error()).size() > 0);

  const std::string dir = temp_dir("badcfg");
  write_file(dir + "/bad.cfg", "[simulate]\nkind = sideways\n");
  OwnedString summary2;
  CHECK(sr_simulate((dir + "/bad.cfg").c_str(), 0, 0,
                    (dir + "/out").c_str(), &summary2.ptr) == SR_ERR_CONFIG);

  // Training on a corpus directory that does not exist reports the failure
  // instead of crashing.
  OwnedString summary3;
  CHECK(sr_train((dir + "/bad.cfg").c_str(), 0, 0,
                 (dir + "/no_corpus").c_str(), (dir + "/m.bin").c_str(),
                 &summary3.ptr) != SR_OK);
}
