#ifndef SPELLRING_SIMULATOR_HPP
#define SPELLRING_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spellring/acoustics.hpp"
#include "spellring/corrector.hpp"
#include "spellring/imu.hpp"
#include "spellring/manifest.hpp"
#include "spellring/rng.hpp"

namespace spellring {

// Distinguishing motion of a letter, performed over its hold period.
enum class Movement { None, JArc, ZTrace };

// Static description of one fingerspelled letter.
struct HandPose {
  std::array<double, 5> finger_extension{};  // thumb..pinky, each in [0, 1]
  std::array<double, 3> palm_orientation{};  // roll, pitch, yaw (radians)
  Movement movement = Movement::None;
};

void validate(const HandPose& pose);

// Parametric hand model: one pose per letter plus the geometry that maps
// finger extensions to echo reflectors. The templates encode the standard
// confusions: k/p, g/q, and h/u share finger extensions and differ only in
// palm orientation; j is i plus an arc movement; a, s, m, n, t form a tight
// fist-shaped cluster.
struct LetterBank {
  std::array<HandPose, 26> templates{};
  std::array<double, 5> reflector_base{};  // meters at zero extension
  std::array<double, 5> reflector_span{};  // meters added at full extension
  std::array<double, 5> reflector_gain{};  // per-finger echo strength
};

LetterBank default_letter_bank();

// A new-signer variant: common offsets on extensions and orientations plus
// scaled reflector geometry. Structural invariants (shared extensions,
// movement assignments, cluster distances) are preserved exactly.
LetterBank make_signer_bank(const LetterBank& base, std::uint64_t signer_seed);

void validate(const LetterBank& bank);

const HandPose& letter_template(const LetterBank& bank, char letter);

struct Reflector {
  double distance = 0.0;     // meters
  double attenuation = 0.0;  // echo amplitude relative to the transmit chirp
};

// Five fingertip reflectors for a pose: distance = base + extension * span,
// attenuation falls off inversely with distance.
std::array<Reflector, 5> reflector_map(const LetterBank& bank,
                                       const HandPose& pose);

struct SynthConfig {
  double letters_per_second = 4.0;
  double coarticulation = 0.15;  // blend fraction between letters, [0, 0.5)
  double noise_snr_db = 20.0;    // +infinity disables noise
  ChirpConfig chirp;
  double gyro_rate = 150.0;  // Hz
  double speed_jitter = 0.2;  // per-session rate variation, [0, 0.5)
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& cfg);

struct SynthResult {
  SampleBuffer audio;
  GyroStream gyro;
  std::string label;
};

// Renders one word: a pose trajectory (hold 1/rate per letter, linear blends
// between letters), echoed chirp train off the pose's reflectors plus white
// noise, and gyro as the orientation derivative plus movement signatures.
SynthResult synthesize_word(const LetterBank& bank, const std::string& word,
                            const SynthConfig& cfg, Rng& rng);

// Convenience overload seeding its own generator from cfg.seed.
SynthResult synthesize_word(const LetterBank& bank, const std::string& word,
                            const SynthConfig& cfg);

// Writes `sessions` shuffled passes over the dictionary under root:
// root/corpus.tsv, root/session_NN/manifest.tsv plus audio and gyro files.
// Each session draws a speed-jittered rate and fresh noise substreams.
std::vector<SessionRef> gen_corpus(const LetterBank& bank,
                                   const Dictionary& dict,
                                   std::size_t sessions,
                                   const SynthConfig& cfg,
                                   const std::string& root);

}  // namespace spellring

#endif
