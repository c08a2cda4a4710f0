/* C interface to the fingerspelling recognizer library.
 *
 * Conventions:
 *   - Every fallible call returns an sr_status; SR_OK is 0.
 *   - On failure, sr_last_error() returns a thread-local message describing
 *     the most recent error in the calling thread.
 *   - Objects created by sr_*_open/load/fit calls are opaque handles freed
 *     with their matching sr_*_free.
 *   - Strings returned through char** out-parameters are heap-allocated and
 *     must be released with sr_string_free.
 */
#ifndef SPELLRING_H
#define SPELLRING_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sr_status {
  SR_OK = 0,
  SR_ERR_INVALID_ARGUMENT = 1,
  SR_ERR_CONFIG = 2,
  SR_ERR_FORMAT = 3,
  SR_ERR_INSUFFICIENT_DATA = 4,
  SR_ERR_ALIGNMENT = 5,
  SR_ERR_INFEASIBLE_ALIGNMENT = 6,
  SR_ERR_NUMERIC = 7,
  SR_ERR_DATA = 8,
  SR_ERR_IO = 9,
  SR_ERR_UNKNOWN = 10
} sr_status;

/* Stable name for a status code, e.g. "config". */
const char* sr_status_name(sr_status status);

/* Message of the last failure in this thread ("" if none). */
const char* sr_last_error(void);

const char* sr_version(void);

void sr_string_free(char* s);

/* ---------- small pure helpers ---------- */

/* Edit distance between two lowercase words. */
sr_status sr_levenshtein(const char* a, const char* b, size_t* out);

/* Letter error rate of hypothesis against reference. */
sr_status sr_ler(const char* reference, const char* hypothesis, double* out);

/* Word error rate between space-separated token strings. */
sr_status sr_wer(const char* reference, const char* hypothesis, double* out);

/* Unambiguous echo range (meters) of a chirp: sound_speed * duration / 2. */
sr_status sr_max_range_m(double sound_speed_mps, double chirp_duration_s,
                         double* out);

/* ---------- dictionary ---------- */

typedef struct sr_dictionary sr_dictionary;

/* File format: one lowercase word per line, optional tab-separated count. */
sr_status sr_dictionary_load(const char* path, sr_dictionary** out);
void sr_dictionary_free(sr_dictionary* dict);
sr_status sr_dictionary_size(const sr_dictionary* dict, size_t* out);

/* Ranked corrections for a raw decode, one "word<TAB>distance<TAB>similarity"
 * line per candidate. */
sr_status sr_correct(const sr_dictionary* dict, const char* raw, size_t top_n,
                     char** out_lines);

/* ---------- phrase language model ---------- */

typedef struct sr_ngram sr_ngram;

/* Fits an add-k smoothed bigram/trigram model over a phrase file (one
 * lowercase space-separated phrase per line). */
sr_status sr_ngram_fit(const char* phrases_path, double k, sr_ngram** out);
void sr_ngram_free(sr_ngram* lm);

/* Log probability of a space-separated word sequence. */
sr_status sr_ngram_score(const sr_ngram* lm, const char* words, double* out);

/* ---------- model checkpoints ---------- */

typedef struct sr_model sr_model;

sr_status sr_model_load(const char* path, sr_model** out);
sr_status sr_model_save(const sr_model* model, const char* path);
void sr_model_free(sr_model* model);

/* "fusion", "acoustic", or "motion". */
sr_status sr_model_modality(const sr_model* model, char** out);

/* ---------- config-driven pipeline entry points ----------
 *
 * Each call reads the same key=value config file the command line uses. The
 * summary out-parameter receives a "key=value key=value ..." line describing
 * the run. Pass seed_given = 0 to use the seed from the config file.
 */

/* Writes a synthetic corpus under out_dir. Set simulate.kind = phrases in
 * the config to render the phrase benchmark instead of the word corpus. */
sr_status sr_simulate(const char* config_path, int seed_given, uint64_t seed,
                      const char* out_dir, char** out_summary);

/* Extracts features for every item (or a single item_id when non-NULL) and
 * writes a per-item summary table to out_dir/features.tsv. */
sr_status sr_features(const char* config_path, const char* corpus_root,
                      const char* item_id, const char* out_dir,
                      char** out_summary);

/* Trains on a corpus and writes the best checkpoint to model_path. */
sr_status sr_train(const char* config_path, int seed_given, uint64_t seed,
                   const char* corpus_root, const char* model_path,
                   char** out_summary);

/* Word benchmark: writes the per-item report to report_path. */
sr_status sr_eval_words(const char* config_path, const char* corpus_root,
                        const char* model_path, const char* report_path,
                        char** out_summary);

/* Phrase benchmark with language-model rescoring: writes the rescored
 * report to report_path and the no-LM baseline next to it. */
sr_status sr_eval_phrases(const char* config_path, const char* corpus_root,
                          const char* model_path, const char* report_path,
                          char** out_summary);

/* Decodes one manifest item; out_detail receives the raw letters, the
 * corrected word, and the top candidates, one per line. */
sr_status sr_decode(const char* config_path, const char* corpus_root,
                    const char* model_path, const char* item_id,
                    char** out_detail, char** out_summary);

#ifdef __cplusplus
}
#endif

#endif /* SPELLRING_H */
