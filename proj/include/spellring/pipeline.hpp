#ifndef SPELLRING_PIPELINE_HPP
#define SPELLRING_PIPELINE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spellring/corrector.hpp"
#include "spellring/features.hpp"
#include "spellring/lang_model.hpp"
#include "spellring/metrics.hpp"
#include "spellring/model.hpp"
#include "spellring/simulator.hpp"
#include "spellring/train.hpp"

namespace spellring {

// Settings shared by the end-to-end flows.
struct PipelineConfig {
  FeatureConfig features;
  TrainConfig train;
  std::size_t top_n = 20;      // candidate list length per word
  std::size_t beam_width = 16;
  double lm_alpha = 0.4;       // language-model weight during rescoring
  double lm_k = 0.25;          // add-k smoothing for the phrase model
};

void validate(const PipelineConfig& cfg);

// Reads every session manifest under a corpus root and extracts features.
std::vector<TrainSession> load_training_sessions(const std::string& root,
                                                 const FeatureConfig& cfg);

// Feature extraction + training over a corpus directory.
TrainResult train_pipeline(const std::string& root, const PipelineConfig& cfg);

// Word-level evaluation: raw beam text scores the letter error rate, the
// dictionary-corrected candidates score top-1..5. Items whose files fail to
// load count as full errors instead of aborting the run.
EvalReport eval_words(const std::string& root, const ModelParams& params,
                      const Dictionary& dict, const PipelineConfig& cfg);

// Renders a phrase benchmark: one corpus whose items spell the phrases in
// order, plus a phrases.txt listing them.
void gen_phrase_corpus(const LetterBank& bank,
                       const std::vector<std::vector<std::string>>& phrases,
                       const SynthConfig& synth, const std::string& root);

struct PhraseEvalResult {
  EvalReport rescored;  // lattice + language model
  EvalReport baseline;  // top-1 correction per word, no language model
};

// Phrase-level evaluation with word lattices rescored incrementally as each
// word arrives; the streaming result must agree with one-shot rescoring.
PhraseEvalResult eval_phrases(const std::string& root,
                              const ModelParams& params,
                              const Dictionary& dict, const NGramModel& lm,
                              const PipelineConfig& cfg);

struct DecodeResult {
  std::string item_id;
  std::string truth;
  std::string raw;                    // beam-decoded letters
  std::vector<Candidate> candidates;  // dictionary-corrected, best first
};

// Decodes a single manifest item by id.
DecodeResult decode_item(const std::string& root, const std::string& item_id,
                         const ModelParams& params, const Dictionary& dict,
                         const PipelineConfig& cfg);

}  // namespace spellring

#endif
