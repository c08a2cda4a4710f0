// Exercises the installed command-line binary as a black box: spawns the real
// executable, captures its streams, and checks the exit-code and output
// contracts. The binary's path is baked in at build time.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#ifndef SPELLRING_CLI_PATH
#error "SPELLRING_CLI_PATH must point at the command-line binary"
#endif

namespace {

std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  std::string dir = "/tmp/spellring_cli_" + tag + "_" +
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

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string stem =
      "/tmp/spellring_cli_io_" + std::to_string(::getpid()) + "_" +
      std::to_string(counter++);
  const std::string command = std::string(SPELLRING_CLI_PATH) + " " + args +
                              " >" + stem + ".out 2>" + stem + ".err";
  const int raw = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = read_file(stem + ".out");
  result.err = read_file(stem + ".err");
  return result;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
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

// Last non-empty stdout line, which must be the machine-parsable summary.
std::string result_line(const RunResult& run) {
  const std::vector<std::string> lines = split_lines(run.out);
  REQUIRE(!lines.empty());
  return lines.back();
}

std::string first_item_id(const std::string& corpus_root) {
  const std::string manifest =
      read_file(corpus_root + "/session_00/manifest.tsv");
  const std::vector<std::string> rows = split_lines(manifest);
  REQUIRE(rows.size() >= 2);
  return rows[1].substr(0, rows[1].find('\t'));
}

}  // namespace

TEST_CASE("usage problems exit with code 2 and help text") {
  const RunResult none = run_cli("");
  CHECK(none.exit_code == 2);
  CHECK(contains(none.err, "Usage"));

  const RunResult unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code == 2);
  CHECK(contains(unknown.err, "Usage"));

  const RunResult bad_flag = run_cli("simulate --config a --out b --wat c");
  CHECK(bad_flag.exit_code == 2);

  // A required flag left out names itself in the usage message.
  const RunResult no_model = run_cli("eval-words --config a --corpus b --out c");
  CHECK(no_model.exit_code == 2);
  CHECK(contains(no_model.err, "--model"));

  const RunResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(contains(help.out, "simulate"));
  CHECK(contains(help.out, "decode"));
}

TEST_CASE("runtime failures exit with code 1 and a single diagnostic line") {
  const std::string dir = temp_dir("err");
  const RunResult missing =
      run_cli("simulate --config /nonexistent.cfg --out " + dir + "/out");
  CHECK(missing.exit_code == 1);
  const std::vector<std::string> err_lines = split_lines(missing.err);
  REQUIRE(err_lines.size() == 1);
  CHECK(contains(err_lines[0], "spellring:"));
  CHECK(missing.out.empty());
}

TEST_CASE("the full pipeline runs through the binary") {
  const std::string dir = temp_dir("e2e");
  const std::string cfg = write_project(dir, "words");
  const std::string corpus = dir + "/corpus";

  const RunResult sim = run_cli("simulate --config " + cfg + " --seed 7 --out " +
                                corpus);
  REQUIRE(sim.exit_code == 0);
  CHECK(result_line(sim).rfind("RESULT ", 0) == 0);
  CHECK(contains(result_line(sim), "kind=words"));
  CHECK(contains(result_line(sim), "items=6"));

  SUBCASE("repeating a seeded command reproduces the corpus byte for byte") {
    const std::string again = dir + "/corpus_again";
    const RunResult rerun = run_cli("simulate --config " + cfg +
                                    " --seed 7 --out " + again);
    REQUIRE(rerun.exit_code == 0);
    CHECK(read_file(corpus + "/corpus.tsv") ==
          read_file(again + "/corpus.tsv"));
    CHECK(read_file(corpus + "/session_00/manifest.tsv") ==
          read_file(again + "/session_00/manifest.tsv"));
    // Compare one audio payload bit for bit.
    const std::string manifest =
        read_file(corpus + "/session_00/manifest.tsv");
    const std::vector<std::string> rows = split_lines(manifest);
    std::istringstream row(rows[1]);
    std::string id, word, audio_rel;
    std::getline(row, id, '\t');
    std::getline(row, word, '\t');
    std::getline(row, audio_rel, '\t');
    CHECK(read_file(corpus + "/" + audio_rel) ==
          read_file(again + "/" + audio_rel));
  }

  SUBCASE("train, evaluate, and decode") {
    const std::string run_dir = dir + "/run";
    const RunResult train = run_cli("train --config " + cfg + " --corpus " +
                                    corpus + " --out " + run_dir + " --seed 5");
    REQUIRE(train.exit_code == 0);
    CHECK(contains(result_line(train), "epochs=6"));
    REQUIRE(file_exists(run_dir + "/model.bin"));

    const RunResult eval = run_cli("eval-words --config " + cfg +
                                   " --corpus " + corpus + " --model " +
                                   run_dir + "/model.bin --out " + run_dir);
    REQUIRE(eval.exit_code == 0);
    CHECK(contains(result_line(eval), "items=6"));
    CHECK(contains(result_line(eval), " ler="));
    CHECK(file_exists(run_dir + "/report.tsv"));

    const RunResult feats = run_cli("features --config " + cfg + " --corpus " +
                                    corpus + " --out " + run_dir);
    REQUIRE(feats.exit_code == 0);
    CHECK(contains(result_line(feats), "items=6"));
    CHECK(file_exists(run_dir + "/features.tsv"));

    // Decode prints the raw string, the corrected word, and up to five
    // candidates, one per line, before the summary.
    const std::string id = first_item_id(corpus);
    const RunResult decode = run_cli("decode --config " + cfg + " --corpus " +
                                     corpus + " --model " + run_dir +
                                     "/model.bin --item " + id);
    REQUIRE(decode.exit_code == 0);
    const std::vector<std::string> lines = split_lines(decode.out);
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0].rfind("raw", 0) == 0);
    CHECK(lines[1].rfind("corrected ", 0) == 0);
    for (std::size_t i = 2; i + 1 < lines.size(); ++i)
      CHECK(lines[i].rfind("candidate ", 0) == 0);
    CHECK(lines.back().rfind("RESULT ", 0) == 0);
    CHECK(contains(lines.back(), "item=" + id));

    const RunResult bad_item = run_cli("decode --config " + cfg +
                                       " --corpus " + corpus + " --model " +
                                       run_dir + "/model.bin --item nope");
    CHECK(bad_item.exit_code == 1);
    CHECK(split_lines(bad_item.err).size() == 1);
  }

  SUBCASE("phrase corpora evaluate with both reports written") {
    const std::string phrase_cfg = write_project(dir, "phrases");
    const std::string run_dir = dir + "/prun";
    const RunResult train = run_cli("train --config " + cfg + " --corpus " +
                                    corpus + " --out " + run_dir + " --seed 5");
    REQUIRE(train.exit_code == 0);

    const std::string pcorpus = dir + "/pcorpus";
    const RunResult sim_p = run_cli("simulate --config " + phrase_cfg +
                                    " --seed 9 --out " + pcorpus);
    REQUIRE(sim_p.exit_code == 0);
    CHECK(contains(result_line(sim_p), "kind=phrases"));

    const RunResult eval_p = run_cli("eval-phrases --config " + phrase_cfg +
                                     " --corpus " + pcorpus + " --model " +
                                     run_dir + "/model.bin --out " + run_dir);
    REQUIRE(eval_p.exit_code == 0);
    CHECK(contains(result_line(eval_p), " wer="));
    CHECK(contains(result_line(eval_p), " wer_nolm="));
    CHECK(file_exists(run_dir + "/phrase_report.tsv"));
    CHECK(file_exists(run_dir + "/phrase_report.tsv.nolm"));
  }
}
