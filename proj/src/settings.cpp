#include "spellring/settings.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spellring/error.hpp"
#include "spellring/manifest.hpp"

namespace spellring {

ChirpConfig chirp_from_config(const Config& cfg) {
  ChirpConfig chirp;
  chirp.f_start = cfg.get_double("chirp.f_start", chirp.f_start);
  chirp.f_end = cfg.get_double("chirp.f_end", chirp.f_end);
  chirp.sample_rate = cfg.get_double("chirp.sample_rate", chirp.sample_rate);
  chirp.chirp_duration =
      cfg.get_double("chirp.chirp_duration", chirp.chirp_duration);
  chirp.sound_speed = cfg.get_double("chirp.sound_speed", chirp.sound_speed);
  validate(chirp);
  return chirp;
}

SynthConfig synth_from_config(const Config& cfg) {
  SynthConfig synth;
  synth.chirp = chirp_from_config(cfg);
  synth.letters_per_second =
      cfg.get_double("synth.letters_per_second", synth.letters_per_second);
  synth.coarticulation =
      cfg.get_double("synth.coarticulation", synth.coarticulation);
  const std::string snr = cfg.get_string("synth.noise_snr_db", "");
  if (snr == "inf" || snr == "infinite")
    synth.noise_snr_db = std::numeric_limits<double>::infinity();
  else
    synth.noise_snr_db =
        cfg.get_double("synth.noise_snr_db", synth.noise_snr_db);
  synth.gyro_rate = cfg.get_double("synth.gyro_rate", synth.gyro_rate);
  synth.speed_jitter = cfg.get_double("synth.speed_jitter", synth.speed_jitter);
  synth.seed = cfg.get_u64("synth.seed", synth.seed);
  validate(synth);
  return synth;
}

FeatureConfig features_from_config(const Config& cfg) {
  FeatureConfig f;
  f.chirp = chirp_from_config(cfg);
  f.acoustic_bins = static_cast<std::size_t>(
      cfg.get_u64("features.acoustic_bins", f.acoustic_bins));
  f.time_decimation = static_cast<std::size_t>(
      cfg.get_u64("features.time_decimation", f.time_decimation));
  f.bandpass = cfg.get_bool("features.bandpass", f.bandpass);
  f.bandpass_low_hz =
      cfg.get_double("features.bandpass_low_hz", f.bandpass_low_hz);
  f.bandpass_high_hz =
      cfg.get_double("features.bandpass_high_hz", f.bandpass_high_hz);
  validate(f);
  return f;
}

TrainConfig train_from_config(const Config& cfg) {
  TrainConfig t;
  t.learning_rate = cfg.get_double("train.learning_rate", t.learning_rate);
  t.batch_size =
      static_cast<std::size_t>(cfg.get_u64("train.batch_size", t.batch_size));
  t.epochs = static_cast<std::size_t>(cfg.get_u64("train.epochs", t.epochs));
  t.noise_std = cfg.get_double("train.noise_std", t.noise_std);
  t.max_concat_words = static_cast<std::size_t>(
      cfg.get_u64("train.max_concat_words", t.max_concat_words));
  t.concat_prob = cfg.get_double("train.concat_prob", t.concat_prob);
  t.pad_fraction = cfg.get_double("train.pad_fraction", t.pad_fraction);
  t.dropout = cfg.get_double("train.dropout", t.dropout);
  t.seed = cfg.get_u64("train.seed", t.seed);
  t.modality =
      parse_modality(cfg.get_string("train.modality", modality_name(t.modality)));
  validate(t);
  return t;
}

PipelineConfig pipeline_from_config(const Config& cfg) {
  PipelineConfig p;
  p.features = features_from_config(cfg);
  p.train = train_from_config(cfg);
  p.top_n = static_cast<std::size_t>(cfg.get_u64("pipeline.top_n", p.top_n));
  p.beam_width =
      static_cast<std::size_t>(cfg.get_u64("pipeline.beam_width", p.beam_width));
  p.lm_alpha = cfg.get_double("pipeline.lm_alpha", p.lm_alpha);
  p.lm_k = cfg.get_double("pipeline.lm_k", p.lm_k);
  validate(p);
  return p;
}

LetterBank bank_from_config(const Config& cfg) {
  const std::uint64_t signer = cfg.get_u64("synth.signer_seed", 0);
  LetterBank bank = default_letter_bank();
  if (signer != 0) bank = make_signer_bank(bank, signer);
  return bank;
}

std::string resolve_config_path(const Config& cfg, const std::string& key) {
  const std::string value = cfg.get_string(key, "");
  if (value.empty()) return value;
  if (value.front() == '/') return value;
  return join_path(parent_dir(cfg.origin()), value);
}

}  // namespace spellring
