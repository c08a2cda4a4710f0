// Command-line front end for the spellring pipeline. Every operation goes
// through the public C interface; this file only parses arguments, derives
// output paths under --out, and prints the summary.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spellring.h"

namespace {

std::string join(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

// Single-line diagnostic on stderr, exit code 1.
int fail(sr_status status) {
  std::string message = sr_last_error();
  for (char& c : message)
    if (c == '\n') c = ' ';
  std::cerr << "spellring: " << sr_status_name(status) << ": " << message
            << std::endl;
  return 1;
}

// Prints optional detail lines and the machine-parsable summary, then frees
// the library-owned strings.
int finish(sr_status status, char* detail, char* summary) {
  int code = 0;
  if (status != SR_OK) {
    code = fail(status);
  } else {
    if (detail != nullptr) std::fputs(detail, stdout);
    std::cout << "RESULT " << (summary != nullptr ? summary : "")
              << std::endl;
  }
  sr_string_free(detail);
  sr_string_free(summary);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fingerspelling recognition pipeline: synthesize corpora, "
               "extract features, train, evaluate, and decode."};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string corpus;
  std::string model;
  std::string item;
  std::uint64_t seed = 0;

  CLI::App* simulate =
      app.add_subcommand("simulate", "Synthesize a labeled corpus");
  simulate->add_option("--config", config, "configuration file")->required();
  simulate->add_option("--out", out, "corpus output directory")->required();
  simulate->add_option("--seed", seed, "override the configured seed");

  CLI::App* features =
      app.add_subcommand("features", "Tabulate feature shapes for a corpus");
  features->add_option("--config", config, "configuration file")->required();
  features->add_option("--corpus", corpus, "corpus root directory")
      ->required();
  features->add_option("--out", out, "table output directory")->required();
  features->add_option("--item", item, "restrict to one manifest item id");

  CLI::App* train = app.add_subcommand("train", "Train a recognition model");
  train->add_option("--config", config, "configuration file")->required();
  train->add_option("--corpus", corpus, "corpus root directory")->required();
  train->add_option("--out", out, "checkpoint output directory")->required();
  train->add_option("--seed", seed, "override the configured seed");

  CLI::App* eval_words =
      app.add_subcommand("eval-words", "Score a model on a word corpus");
  eval_words->add_option("--config", config, "configuration file")
      ->required();
  eval_words->add_option("--corpus", corpus, "corpus root directory")
      ->required();
  eval_words->add_option("--model", model, "trained model checkpoint")
      ->required();
  eval_words->add_option("--out", out, "report output directory")->required();

  CLI::App* eval_phrases = app.add_subcommand(
      "eval-phrases", "Score a model on a phrase corpus with rescoring");
  eval_phrases->add_option("--config", config, "configuration file")
      ->required();
  eval_phrases->add_option("--corpus", corpus, "corpus root directory")
      ->required();
  eval_phrases->add_option("--model", model, "trained model checkpoint")
      ->required();
  eval_phrases->add_option("--out", out, "report output directory")
      ->required();

  CLI::App* decode =
      app.add_subcommand("decode", "Decode a single recorded item");
  decode->add_option("--config", config, "configuration file")->required();
  decode->add_option("--corpus", corpus, "corpus root directory")->required();
  decode->add_option("--model", model, "trained model checkpoint")
      ->required();
  decode->add_option("--item", item, "manifest item id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  char* detail = nullptr;
  char* summary = nullptr;

  if (simulate->parsed()) {
    const int seed_given = simulate->count("--seed") > 0 ? 1 : 0;
    const sr_status status =
        sr_simulate(config.c_str(), seed_given, seed, out.c_str(), &summary);
    return finish(status, nullptr, summary);
  }
  if (features->parsed()) {
    const char* item_id = features->count("--item") > 0 ? item.c_str()
                                                        : nullptr;
    const sr_status status = sr_features(config.c_str(), corpus.c_str(),
                                         item_id, out.c_str(), &summary);
    return finish(status, nullptr, summary);
  }
  if (train->parsed()) {
    const int seed_given = train->count("--seed") > 0 ? 1 : 0;
    const std::string model_path = join(out, "model.bin");
    const sr_status status = sr_train(config.c_str(), seed_given, seed,
                                      corpus.c_str(), model_path.c_str(),
                                      &summary);
    return finish(status, nullptr, summary);
  }
  if (eval_words->parsed()) {
    const std::string report_path = join(out, "report.tsv");
    const sr_status status =
        sr_eval_words(config.c_str(), corpus.c_str(), model.c_str(),
                      report_path.c_str(), &summary);
    return finish(status, nullptr, summary);
  }
  if (eval_phrases->parsed()) {
    const std::string report_path = join(out, "phrase_report.tsv");
    const sr_status status =
        sr_eval_phrases(config.c_str(), corpus.c_str(), model.c_str(),
                        report_path.c_str(), &summary);
    return finish(status, nullptr, summary);
  }
  if (decode->parsed()) {
    const sr_status status =
        sr_decode(config.c_str(), corpus.c_str(), model.c_str(),
                  item.c_str(), &detail, &summary);
    return finish(status, detail, summary);
  }

  std::cerr << "usage error: no subcommand\n\n" << app.help();
  return 2;
}
