#include "spellring/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "spellring/error.hpp"
#include "spellring/io.hpp"

namespace spellring {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Inter-word silence inside a session (the space-key pause).
constexpr double kWordGapSeconds = 0.6;

HandPose pose(std::initializer_list<double> ext,
              std::initializer_list<double> orient, Movement move) {
  HandPose p;
  std::copy(ext.begin(), ext.end(), p.finger_extension.begin());
  std::copy(orient.begin(), orient.end(), p.palm_orientation.begin());
  p.movement = move;
  return p;
}

// Pose trajectory of one word: letter holds with optional linear blends.
struct Segment {
  double t0 = 0.0, t1 = 0.0;
  HandPose from;
  HandPose to;         // equals `from` during holds
  bool blending = false;
  Movement move = Movement::None;
};

std::vector<Segment> build_trajectory(const LetterBank& bank,
                                      const std::string& word,
                                      double letters_per_second,
                                      double coarticulation, double* total) {
  const double hold = 1.0 / letters_per_second;
  const double blend = coarticulation / letters_per_second;
  std::vector<Segment> segs;
  double cursor = 0.0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    const HandPose& p = letter_template(bank, word[k]);
    Segment s;
    s.t0 = cursor;
    s.t1 = cursor + hold;
    s.from = s.to = p;
    s.move = p.movement;
    segs.push_back(s);
    cursor = s.t1;
    if (k + 1 < word.size() && blend > 0.0) {
      Segment b;
      b.t0 = cursor;
      b.t1 = cursor + blend;
      b.from = p;
      b.to = letter_template(bank, word[k + 1]);
      b.blending = true;
      segs.push_back(b);
      cursor = b.t1;
    }
  }
  *total = cursor;
  return segs;
}

double lerp(double a, double b, double u) { return a + (b - a) * u; }

HandPose pose_in_segment(const Segment& s, double u) {
  if (!s.blending) return s.from;
  HandPose p;
  for (int i = 0; i < 5; ++i)
    p.finger_extension[i] =
        lerp(s.from.finger_extension[i], s.to.finger_extension[i], u);
  for (int i = 0; i < 3; ++i)
    p.palm_orientation[i] =
        lerp(s.from.palm_orientation[i], s.to.palm_orientation[i], u);
  return p;
}

// Angular-rate signature of a movement at progress u through its hold.
std::array<double, 3> movement_rate(Movement move, double u) {
  switch (move) {
    case Movement::JArc:
      return {3.0 * std::sin(kPi * u), 0.9 * std::cos(kPi * u),
              2.4 * std::cos(kPi * u)};
    case Movement::ZTrace:
      return {2.0 * std::sin(3.0 * kPi * u), 2.5 * std::cos(3.0 * kPi * u),
              0.5 * std::sin(2.0 * kPi * u)};
    case Movement::None:
      break;
  }
  return {0.0, 0.0, 0.0};
}

// Advances a monotone cursor through the segment list.
const Segment& segment_at(const std::vector<Segment>& segs, double t,
                          std::size_t* cursor) {
  while (*cursor + 1 < segs.size() && t >= segs[*cursor].t1) ++(*cursor);
  return segs[*cursor];
}

void check_word(const std::string& word) {
  if (word.empty())
    raise(ErrorKind::InvalidArgument, "synthesize_word: empty word");
  for (char c : word)
    if (c < 'a' || c > 'z')
      raise(ErrorKind::InvalidArgument,
            "synthesize_word: word must match [a-z]+, got '" + word + "'");
}

}  // namespace

void validate(const HandPose& p) {
  for (double e : p.finger_extension)
    if (!std::isfinite(e) || e < 0.0 || e > 1.0)
      raise(ErrorKind::Data, "hand pose: finger extension outside [0, 1]");
  for (double a : p.palm_orientation)
    if (!std::isfinite(a) || a <= -kPi || a > kPi)
      raise(ErrorKind::Data, "hand pose: orientation angle outside (-pi, pi]");
}

LetterBank default_letter_bank() {
  LetterBank bank;
  auto& t = bank.templates;
  // Extensions are thumb..pinky; orientations are roll, pitch, yaw.
  t['a' - 'a'] = pose({0.26, 0.06, 0.06, 0.06, 0.06}, {0.05, -0.10, 0.00}, Movement::None);
  t['b' - 'a'] = pose({0.10, 0.95, 0.95, 0.95, 0.95}, {0.00, 0.05, -0.04}, Movement::None);
  t['c' - 'a'] = pose({0.55, 0.55, 0.55, 0.55, 0.55}, {0.60, 0.00, 0.10}, Movement::None);
  t['d' - 'a'] = pose({0.40, 0.95, 0.15, 0.12, 0.10}, {0.10, 0.08, 0.02}, Movement::None);
  t['e' - 'a'] = pose({0.15, 0.25, 0.25, 0.25, 0.25}, {0.02, -0.06, 0.03}, Movement::None);
  t['f' - 'a'] = pose({0.45, 0.45, 0.92, 0.92, 0.92}, {0.08, 0.12, -0.06}, Movement::None);
  t['g' - 'a'] = pose({0.60, 0.90, 0.08, 0.08, 0.08}, {1.20, 0.00, 0.30}, Movement::None);
  t['h' - 'a'] = pose({0.25, 0.92, 0.92, 0.08, 0.08}, {1.20, 0.00, -0.20}, Movement::None);
  t['i' - 'a'] = pose({0.20, 0.08, 0.08, 0.08, 0.90}, {0.04, 0.02, 0.06}, Movement::None);
  t['j' - 'a'] = pose({0.20, 0.08, 0.08, 0.08, 0.90}, {0.04, 0.02, 0.06}, Movement::JArc);
  t['k' - 'a'] = pose({0.55, 0.95, 0.90, 0.08, 0.08}, {0.00, 0.15, 0.10}, Movement::None);
  t['l' - 'a'] = pose({0.90, 0.95, 0.08, 0.08, 0.08}, {0.06, 0.10, -0.08}, Movement::None);
  t['m' - 'a'] = pose({0.16, 0.10, 0.10, 0.10, 0.06}, {0.03, -0.12, 0.01}, Movement::None);
  t['n' - 'a'] = pose({0.17, 0.12, 0.12, 0.06, 0.06}, {0.01, -0.14, -0.02}, Movement::None);
  t['o' - 'a'] = pose({0.45, 0.40, 0.40, 0.40, 0.40}, {0.40, 0.05, 0.00}, Movement::None);
  t['p' - 'a'] = pose({0.55, 0.95, 0.90, 0.08, 0.08}, {0.10, -1.20, 0.10}, Movement::None);
  t['q' - 'a'] = pose({0.60, 0.90, 0.08, 0.08, 0.08}, {1.20, -1.10, 0.30}, Movement::None);
  t['r' - 'a'] = pose({0.15, 0.90, 0.85, 0.08, 0.08}, {0.05, 0.06, 0.12}, Movement::None);
  t['s' - 'a'] = pose({0.22, 0.10, 0.10, 0.10, 0.10}, {0.00, -0.08, 0.00}, Movement::None);
  t['t' - 'a'] = pose({0.20, 0.14, 0.08, 0.06, 0.06}, {0.06, -0.05, 0.04}, Movement::None);
  t['u' - 'a'] = pose({0.25, 0.92, 0.92, 0.08, 0.08}, {0.00, 0.10, -0.20}, Movement::None);
  t['v' - 'a'] = pose({0.18, 0.97, 0.80, 0.06, 0.06}, {0.02, 0.12, 0.05}, Movement::None);
  t['w' - 'a'] = pose({0.15, 0.95, 0.95, 0.95, 0.10}, {0.04, 0.14, -0.03}, Movement::None);
  t['x' - 'a'] = pose({0.18, 0.50, 0.08, 0.08, 0.08}, {0.08, 0.00, 0.09}, Movement::None);
  t['y' - 'a'] = pose({0.92, 0.08, 0.08, 0.08, 0.92}, {0.30, 0.02, -0.10}, Movement::None);
  t['z' - 'a'] = pose({0.20, 0.93, 0.10, 0.08, 0.08}, {0.05, 0.04, 0.08}, Movement::ZTrace);

  bank.reflector_base = {0.022, 0.030, 0.034, 0.032, 0.028};
  bank.reflector_span = {0.030, 0.095, 0.105, 0.095, 0.080};
  bank.reflector_gain = {0.6, 1.0, 1.0, 0.9, 0.7};
  return bank;
}

LetterBank make_signer_bank(const LetterBank& base, std::uint64_t signer_seed) {
  Rng rng(signer_seed);
  LetterBank bank = base;
  std::array<double, 5> ext_offset;
  for (double& v : ext_offset) v = rng.uniform(-0.03, 0.03);
  std::array<double, 3> orient_offset;
  for (double& v : orient_offset) v = rng.uniform(-0.15, 0.15);
  for (HandPose& p : bank.templates) {
    for (int i = 0; i < 5; ++i)
      p.finger_extension[i] =
          std::clamp(p.finger_extension[i] + ext_offset[i], 0.0, 1.0);
    for (int i = 0; i < 3; ++i) p.palm_orientation[i] += orient_offset[i];
  }
  for (int i = 0; i < 5; ++i) {
    bank.reflector_base[i] *= 1.0 + rng.uniform(-0.05, 0.05);
    bank.reflector_span[i] *= 1.0 + rng.uniform(-0.08, 0.08);
  }
  validate(bank);
  return bank;
}

void validate(const LetterBank& bank) {
  for (const HandPose& p : bank.templates) validate(p);
  for (int i = 0; i < 5; ++i) {
    if (!(bank.reflector_base[i] > 0.0) || !(bank.reflector_span[i] >= 0.0) ||
        !(bank.reflector_gain[i] > 0.0))
      raise(ErrorKind::Data, "letter bank: reflector geometry must be positive");
  }

  auto same_ext = [&](char x, char y) {
    return letter_template(bank, x).finger_extension ==
           letter_template(bank, y).finger_extension;
  };
  auto same_orient = [&](char x, char y) {
    return letter_template(bank, x).palm_orientation ==
           letter_template(bank, y).palm_orientation;
  };
  for (auto [x, y] : {std::pair{'k', 'p'}, {'g', 'q'}, {'h', 'u'}}) {
    if (!same_ext(x, y) || same_orient(x, y))
      raise(ErrorKind::Data,
            std::string("letter bank: '") + x + "'/'" + y +
                "' must share extensions and differ in orientation");
  }
  if (!same_ext('i', 'j') || !same_orient('i', 'j') ||
      letter_template(bank, 'i').movement != Movement::None ||
      letter_template(bank, 'j').movement != Movement::JArc)
    raise(ErrorKind::Data,
          "letter bank: 'j' must be 'i' plus an arc movement");

  const std::string cluster = "asmnt";
  for (char x : cluster)
    for (char y : cluster) {
      if (x == y) continue;
      double d2 = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double d = letter_template(bank, x).finger_extension[i] -
                         letter_template(bank, y).finger_extension[i];
        d2 += d * d;
      }
      if (std::sqrt(d2) > 0.15)
        raise(ErrorKind::Data,
              std::string("letter bank: '") + x + "' and '" + y +
                  "' must stay within 0.15 in finger space");
    }

  for (int x = 0; x < 26; ++x)
    for (int y = x + 1; y < 26; ++y) {
      const HandPose& a = bank.templates[x];
      const HandPose& b = bank.templates[y];
      if (a.finger_extension == b.finger_extension &&
          a.palm_orientation == b.palm_orientation &&
          a.movement == b.movement)
        raise(ErrorKind::Data,
              std::string("letter bank: '") + char('a' + x) + "' and '" +
                  char('a' + y) + "' are indistinguishable");
    }

  for (int x = 0; x < 26; ++x)
    for (const Reflector& r : reflector_map(bank, bank.templates[x]))
      if (r.distance < 0.02)
        raise(ErrorKind::Data,
              std::string("letter bank: '") + char('a' + x) +
                  "' places a reflector closer than 0.02 m");
}

const HandPose& letter_template(const LetterBank& bank, char letter) {
  if (letter < 'a' || letter > 'z')
    raise(ErrorKind::InvalidArgument,
          std::string("letter_template: '") + letter + "' is not in a-z");
  return bank.templates[letter - 'a'];
}

std::array<Reflector, 5> reflector_map(const LetterBank& bank,
                                       const HandPose& pose) {
  std::array<Reflector, 5> out;
  for (int i = 0; i < 5; ++i) {
    const double d =
        bank.reflector_base[i] + pose.finger_extension[i] * bank.reflector_span[i];
    out[i].distance = d;
    out[i].attenuation = 0.08 * bank.reflector_gain[i] * (0.05 / d);
  }
  return out;
}

void validate(const SynthConfig& cfg) {
  if (!(cfg.letters_per_second > 0.0) || cfg.letters_per_second > 12.0)
    raise(ErrorKind::Config, "synth: letters_per_second out of range");
  if (!(cfg.coarticulation >= 0.0) || cfg.coarticulation >= 0.5)
    raise(ErrorKind::Config, "synth: coarticulation must be in [0, 0.5)");
  if (std::isnan(cfg.noise_snr_db))
    raise(ErrorKind::Config, "synth: noise_snr_db must not be NaN");
  if (!(cfg.gyro_rate > 0.0) || cfg.gyro_rate > 10000.0)
    raise(ErrorKind::Config, "synth: gyro_rate out of range");
  if (!(cfg.speed_jitter >= 0.0) || cfg.speed_jitter >= 0.5)
    raise(ErrorKind::Config, "synth: speed_jitter must be in [0, 0.5)");
  validate(cfg.chirp);
}

SynthResult synthesize_word(const LetterBank& bank, const std::string& word,
                            const SynthConfig& cfg, Rng& rng) {
  check_word(word);
  validate(bank);
  validate(cfg);

  const double limit = max_range(cfg.chirp);
  for (char c : word)
    for (const Reflector& r : reflector_map(bank, letter_template(bank, c)))
      if (r.distance >= limit)
        raise(ErrorKind::Config,
              std::string("synthesize_word: reflector for '") + c +
                  "' lies beyond the chirp's unambiguous range");

  double total = 0.0;
  const std::vector<Segment> segs = build_trajectory(
      bank, word, cfg.letters_per_second, cfg.coarticulation, &total);

  const SampleBuffer chirp = make_chirp(cfg.chirp);
  const std::size_t chirp_len = chirp.samples.size();
  const double fs = cfg.chirp.sample_rate;
  const std::size_t n_chirps = static_cast<std::size_t>(
      std::ceil(total / cfg.chirp.chirp_duration));
  const std::size_t n_samples = n_chirps * chirp_len;

  SynthResult out;
  out.label = word;
  out.audio.sample_rate = fs;
  out.audio.start_time = 0.0;
  out.audio.samples.assign(n_samples, 0.0f);

  std::size_t cursor = 0;
  std::array<Reflector, 5> cached = reflector_map(bank, segs.front().from);
  const Segment* cached_seg = &segs.front();
  double sum_sq = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / fs;
    const Segment& seg = segment_at(segs, std::min(t, total), &cursor);
    if (seg.blending) {
      const double u =
          std::clamp((t - seg.t0) / (seg.t1 - seg.t0), 0.0, 1.0);
      cached = reflector_map(bank, pose_in_segment(seg, u));
      cached_seg = &seg;
    } else if (cached_seg != &seg) {
      cached = reflector_map(bank, seg.from);
      cached_seg = &seg;
    }
    double acc = 0.0;
    for (const Reflector& r : cached) {
      const long long delay = std::llround(2.0 * r.distance /
                                           cfg.chirp.sound_speed * fs);
      const long long idx = static_cast<long long>(n) - delay;
      if (idx >= 0)
        acc += r.attenuation *
               chirp.samples[static_cast<std::size_t>(idx) % chirp_len];
    }
    out.audio.samples[n] = static_cast<float>(acc);
    sum_sq += acc * acc;
  }

  if (std::isfinite(cfg.noise_snr_db)) {
    const double rms = std::sqrt(sum_sq / static_cast<double>(n_samples));
    const double sigma = rms * std::pow(10.0, -cfg.noise_snr_db / 20.0);
    if (sigma > 0.0)
      for (float& s : out.audio.samples)
        s = static_cast<float>(s + rng.gaussian(0.0, sigma));
  }

  out.gyro.nominal_rate = cfg.gyro_rate;
  const double gyro_sigma =
      std::isfinite(cfg.noise_snr_db)
          ? 0.5 * std::pow(10.0, -cfg.noise_snr_db / 20.0)
          : 0.0;
  const std::size_t last = static_cast<std::size_t>(
      std::ceil(total * cfg.gyro_rate));
  cursor = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double t = static_cast<double>(k) / cfg.gyro_rate;
    std::array<double, 3> omega = {0.0, 0.0, 0.0};
    if (t < total) {
      const Segment& seg = segment_at(segs, t, &cursor);
      if (seg.blending) {
        const double inv = 1.0 / (seg.t1 - seg.t0);
        for (int i = 0; i < 3; ++i)
          omega[i] = (seg.to.palm_orientation[i] -
                      seg.from.palm_orientation[i]) *
                     inv;
      } else {
        const double u =
            std::clamp((t - seg.t0) / (seg.t1 - seg.t0), 0.0, 1.0);
        omega = movement_rate(seg.move, u);
      }
    }
    GyroSample s;
    s.t = t;
    s.x = omega[0] + (gyro_sigma > 0.0 ? rng.gaussian(0.0, gyro_sigma) : 0.0);
    s.y = omega[1] + (gyro_sigma > 0.0 ? rng.gaussian(0.0, gyro_sigma) : 0.0);
    s.z = omega[2] + (gyro_sigma > 0.0 ? rng.gaussian(0.0, gyro_sigma) : 0.0);
    out.gyro.samples.push_back(s);
  }
  return out;
}

SynthResult synthesize_word(const LetterBank& bank, const std::string& word,
                            const SynthConfig& cfg) {
  Rng rng(cfg.seed);
  return synthesize_word(bank, word, cfg, rng);
}

std::vector<SessionRef> gen_corpus(const LetterBank& bank,
                                   const Dictionary& dict,
                                   std::size_t sessions,
                                   const SynthConfig& cfg,
                                   const std::string& root) {
  if (sessions == 0)
    raise(ErrorKind::InvalidArgument, "gen_corpus: sessions must be >= 1");
  if (cfg.letters_per_second < 1.0 || cfg.letters_per_second > 8.0)
    raise(ErrorKind::Config,
          "gen_corpus: base letters_per_second must be in [1, 8]");
  validate(dict);
  validate(cfg);
  ensure_directory(root);

  Rng root_rng(cfg.seed);
  std::vector<SessionRef> refs;
  for (std::size_t s = 0; s < sessions; ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "session_%02zu", s);
    const std::string session_dir = join_path(root, name);
    ensure_directory(session_dir);

    Rng session_rng = root_rng.substream(0x5e000000ull + s);
    const double speed =
        cfg.letters_per_second *
        (1.0 + cfg.speed_jitter * session_rng.uniform(-1.0, 1.0));
    std::vector<std::size_t> order(dict.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[session_rng.below(i)]);

    SynthConfig wcfg = cfg;
    wcfg.letters_per_second = speed;
    std::vector<ManifestItem> items;
    double clock = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::string& word = dict.entries[order[i]].word;
      Rng item_rng =
          root_rng.substream(((s + 1) << 32) | static_cast<std::uint64_t>(i));
      SynthResult synth = synthesize_word(bank, word, wcfg, item_rng);

      char stem[48];
      std::snprintf(stem, sizeof(stem), "%s/item_%03zu", name, i);
      ManifestItem item;
      item.id = std::string(name) + "_" + std::to_string(i);
      item.word = word;
      item.audio_path = std::string(stem) + ".f32";
      item.gyro_path = std::string(stem) + ".gyro";
      item.start_time = clock;
      item.letters_per_second = speed;
      write_audio(join_path(root, item.audio_path), synth.audio.samples);
      write_gyro(join_path(root, item.gyro_path), synth.gyro.samples);
      items.push_back(item);

      clock += static_cast<double>(synth.audio.samples.size()) /
                   cfg.chirp.sample_rate +
               kWordGapSeconds;
    }
    write_manifest(join_path(session_dir, "manifest.tsv"), items);
    refs.push_back(SessionRef{name, std::string(name) + "/manifest.tsv"});
  }
  write_corpus_index(join_path(root, "corpus.tsv"), refs);
  return refs;
}

}  // namespace spellring
