#ifndef SPELLRING_SETTINGS_HPP
#define SPELLRING_SETTINGS_HPP

#include <string>

#include "spellring/config.hpp"
#include "spellring/pipeline.hpp"
#include "spellring/simulator.hpp"

namespace spellring {

// Translators from a key=value config file to the typed settings structs.
// Every key is optional; absent keys keep the documented defaults. Sections:
// [chirp], [synth], [features], [train], [pipeline], [paths].

ChirpConfig chirp_from_config(const Config& cfg);
SynthConfig synth_from_config(const Config& cfg);
FeatureConfig features_from_config(const Config& cfg);
TrainConfig train_from_config(const Config& cfg);  // `pretrained` left unset
PipelineConfig pipeline_from_config(const Config& cfg);

// synth.signer_seed = 0 keeps the stock templates; any other value derives a
// perturbed signer bank.
LetterBank bank_from_config(const Config& cfg);

// Path-valued key resolved against the config file's directory; empty when
// the key is absent.
std::string resolve_config_path(const Config& cfg, const std::string& key);

}  // namespace spellring

#endif
