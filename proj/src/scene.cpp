#include "skyear/scene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "skyear/error.hpp"
#include "skyear/fft.hpp"
#include "skyear/rng.hpp"

namespace skyear {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSincHalfWidth = 32;

void normalize_rms(std::vector<double>& x) {
  const double r = rms(x);
  if (r > 0.0) {
    for (double& v : x) v /= r;
  }
}

std::vector<double> white_noise(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = gaussian(rng);
  return x;
}

// 1/f power spectrum by shaping white noise in the frequency domain.
std::vector<double> pink_noise(std::size_t n, Rng& rng) {
  const int size = static_cast<int>(n);
  RealFft fft(size);
  std::vector<double> white = white_noise(n, rng);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(fft.bins()));
  fft.forward(white, spec);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) spec[k] /= std::sqrt(static_cast<double>(k));
  std::vector<double> out(n);
  fft.inverse(spec, out);
  normalize_rms(out);
  return out;
}

Waveform rotor_noise(std::size_t n, Rng& rng, const GeneratorConfig& cfg) {
  const double f0 = cfg.rotor_fundamental_hz * (1.0 + uniform(rng, -0.01, 0.01));
  const double am_rate = uniform(rng, 0.3, 1.5);
  const double am_phase = uniform(rng, 0.0, kTwoPi);
  std::vector<double> phases(static_cast<std::size_t>(cfg.rotor_harmonics));
  for (double& p : phases) p = uniform(rng, 0.0, kTwoPi);

  std::vector<double> x(n, 0.0);
  for (int h = 1; h <= cfg.rotor_harmonics; ++h) {
    const double f = h * f0;
    if (f >= 0.5 * cfg.fs) break;
    const double amp = 1.0 / std::sqrt(static_cast<double>(h));
    const double w = kTwoPi * f / cfg.fs;
    const double phase = phases[static_cast<std::size_t>(h - 1)];
    for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(w * static_cast<double>(i) + phase);
  }
  const double wam = kTwoPi * am_rate / cfg.fs;
  for (std::size_t i = 0; i < n; ++i) x[i] *= 1.0 + 0.15 * std::sin(wam * static_cast<double>(i) + am_phase);

  const double broadband = rms(x) * std::pow(10.0, cfg.rotor_broadband_db / 20.0);
  for (std::size_t i = 0; i < n; ++i) x[i] += broadband * gaussian(rng);
  normalize_rms(x);
  return Waveform{std::move(x), cfg.fs};
}

// Slowly varying positive envelope built from a few sub-hertz sinusoids.
std::vector<double> gust_envelope(std::size_t n, double fs, Rng& rng, double depth) {
  double f[3], p[3];
  for (int k = 0; k < 3; ++k) {
    f[k] = uniform(rng, 0.1, 0.6);
    p[k] = uniform(rng, 0.0, kTwoPi);
  }
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::sin(kTwoPi * f[k] * t + p[k]);
    env[i] = std::exp(depth * s / 3.0);
  }
  return env;
}

Waveform desert_noise(std::size_t n, Rng& rng, const GeneratorConfig& cfg) {
  std::vector<double> x = pink_noise(n, rng);
  const std::vector<double> env = gust_envelope(n, cfg.fs, rng, 0.6);
  for (std::size_t i = 0; i < n; ++i) x[i] *= env[i];
  normalize_rms(x);
  return Waveform{std::move(x), cfg.fs};
}

Waveform forest_noise(std::size_t n, Rng& rng, const GeneratorConfig& cfg) {
  std::vector<double> x = pink_noise(n, rng);
  const double duration = static_cast<double>(n) / cfg.fs;
  // Poisson arrivals of short frequency-swept chirps in the 2-6 kHz band.
  double t = 0.0;
  while (true) {
    t += -std::log(1.0 - uniform(rng, 0.0, 1.0)) / cfg.bird_rate_hz;
    if (t >= duration) break;
    const double len = uniform(rng, 0.05, 0.25);
    const double f_start = uniform(rng, 2000.0, 6000.0);
    const double f_end = std::clamp(f_start + uniform(rng, -1500.0, 1500.0), 2000.0, 6000.0);
    const double trill_rate = uniform(rng, 8.0, 30.0);
    const double trill_depth = uniform(rng, 0.0, 300.0);
    const double amp = uniform(rng, 1.0, 3.0);
    const std::size_t i0 = static_cast<std::size_t>(t * cfg.fs);
    const std::size_t count = static_cast<std::size_t>(len * cfg.fs);
    double phase = 0.0;
    for (std::size_t j = 0; j < count && i0 + j < n; ++j) {
      const double u = static_cast<double>(j) / static_cast<double>(count);
      const double tt = static_cast<double>(j) / cfg.fs;
      const double f = f_start + (f_end - f_start) * u + trill_depth * std::sin(kTwoPi * trill_rate * tt);
      phase += kTwoPi * f / cfg.fs;
      const double env = 0.5 - 0.5 * std::cos(kTwoPi * u);
      x[i0 + j] += amp * env * std::sin(phase);
    }
  }
  normalize_rms(x);
  return Waveform{std::move(x), cfg.fs};
}

struct VoiceShape {
  double f0_lo, f0_hi;
  double formants[3];
};

double formant_gain(double f, const double (&formants)[3]) {
  double g = 0.1;
  for (double fc : formants) {
    const double z = (f - fc) / (0.15 * fc + 80.0);
    g += std::exp(-0.5 * z * z);
  }
  return g;
}

// Intermittent harmonic vocalization: bursts with an arched f0 contour,
// vibrato, formant-weighted harmonics and a little breath noise.
Waveform vocalization(std::size_t n, Rng& rng, const VoiceShape& shape, double fs) {
  std::vector<double> x(n, 0.0);
  const double duration = static_cast<double>(n) / fs;
  const double span = shape.f0_hi - shape.f0_lo;
  double t = uniform(rng, 0.0, 0.08);
  while (t < duration - 0.1) {
    const double len = std::min(uniform(rng, 0.35, 0.8), duration - t);
    const double f_start = shape.f0_lo + span * uniform(rng, 0.0, 0.35);
    const double f_peak = shape.f0_lo + span * uniform(rng, 0.65, 1.0);
    const double f_end = shape.f0_lo + span * uniform(rng, 0.0, 0.45);
    const double vib_rate = uniform(rng, 4.0, 7.0);
    const double vib_depth = uniform(rng, 0.005, 0.025);
    double formants[3];
    for (int k = 0; k < 3; ++k) formants[k] = shape.formants[k] * uniform(rng, 0.9, 1.1);

    const std::size_t i0 = static_cast<std::size_t>(t * fs);
    const std::size_t count = static_cast<std::size_t>(len * fs);
    const double attack = 0.03 * fs, release = 0.06 * fs;
    double phase = uniform(rng, 0.0, kTwoPi);
    for (std::size_t j = 0; j < count && i0 + j < n; ++j) {
      const double u = static_cast<double>(j) / static_cast<double>(count);
      const double tt = static_cast<double>(j) / fs;
      // Quadratic Bezier through start -> peak -> end.
      double f0 = (1 - u) * (1 - u) * f_start + 2 * u * (1 - u) * f_peak + u * u * f_end;
      f0 = std::clamp(f0, shape.f0_lo, shape.f0_hi) * (1.0 + vib_depth * std::sin(kTwoPi * vib_rate * tt));
      phase += kTwoPi * f0 / fs;
      double env = 1.0;
      const double jj = static_cast<double>(j);
      const double rem = static_cast<double>(count - j);
      if (jj < attack) env = 0.5 - 0.5 * std::cos(std::numbers::pi * jj / attack);
      if (rem < release) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * rem / release));
      double s = 0.0;
      for (int k = 1; k * f0 < 5000.0; ++k) {
        s += formant_gain(k * f0, formants) / std::pow(k, 0.7) * std::sin(k * phase);
      }
      x[i0 + j] += env * (s + 0.03 * gaussian(rng));
    }
    t += len + uniform(rng, 0.05, 0.25);
  }
  normalize_rms(x);
  return Waveform{std::move(x), fs};
}

double blackman(double x) {
  // Window over [-L, L] with L = half width + 1 so the outermost taps stay nonzero.
  const double L = kSincHalfWidth + 1.0;
  return 0.42 + 0.5 * std::cos(std::numbers::pi * x / L) + 0.08 * std::cos(2.0 * std::numbers::pi * x / L);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

double rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double pascals_for_level(double level_db) { return std::pow(10.0, (level_db - kReferenceLevelDb) / 20.0); }

double level_for_pascals(double rms_pa) { return kReferenceLevelDb + 20.0 * std::log10(rms_pa); }

void MultiChannelClip::validate() const {
  for (const Waveform& ch : channels) {
    if (ch.size() != length() || ch.fs != fs()) {
      throw Error(ErrorCode::ChannelMismatch, "clip channels differ in length or sample rate");
    }
  }
}

MultiChannelClip MultiChannelClip::slice(std::size_t offset, std::size_t count) const {
  MultiChannelClip out;
  out.start_time = start_time + static_cast<double>(offset) / fs();
  out.channels.reserve(channels.size());
  for (const Waveform& ch : channels) {
    const auto first = ch.samples.begin() + static_cast<std::ptrdiff_t>(offset);
    out.channels.push_back(Waveform{std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count)), ch.fs});
  }
  return out;
}

MultiChannelClip mono_clip(Waveform w, double start_time) {
  MultiChannelClip clip;
  clip.channels.push_back(std::move(w));
  clip.start_time = start_time;
  return clip;
}

Scenario parse_scenario(std::string_view name) {
  if (name == "desert") return Scenario::Desert;
  if (name == "forest") return Scenario::Forest;
  throw Error(ErrorCode::ConfigError, "unknown scenario '" + std::string(name) + "'");
}

std::string_view scenario_name(Scenario s) { return s == Scenario::Desert ? "desert" : "forest"; }

ScenarioProfile scenario_profile(Scenario s) {
  ScenarioProfile p;
  p.scenario = s;
  if (s == Scenario::Desert) {
    p.alpha = 2.0;
    p.env_level_db = 25.0;
    p.threshold = 1.57;
  } else {
    p.alpha = 2.5;
    p.env_level_db = 35.0;
    p.threshold = 1.33;
  }
  p.rotor_level_db = 75.0;
  p.victim_level_db = 120.0;
  return p;
}

Waveform set_level(const Waveform& w, double target_db) {
  const double current = rms(w);
  if (current == 0.0) throw Error(ErrorCode::SilentInput, "cannot calibrate a silent waveform");
  const double gain = pascals_for_level(target_db) / current;
  Waveform out{w.samples, w.fs};
  for (double& v : out.samples) v *= gain;
  return out;
}

SignalKind parse_signal_kind(std::string_view name) {
  if (name == "rotor") return SignalKind::Rotor;
  if (name == "env_desert") return SignalKind::EnvDesert;
  if (name == "env_forest") return SignalKind::EnvForest;
  if (name == "victim_cry") return SignalKind::VictimCry;
  if (name == "victim_shout") return SignalKind::VictimShout;
  throw Error(ErrorCode::UnknownKind, "unknown signal kind '" + std::string(name) + "'");
}

std::string_view signal_kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Rotor: return "rotor";
    case SignalKind::EnvDesert: return "env_desert";
    case SignalKind::EnvForest: return "env_forest";
    case SignalKind::VictimCry: return "victim_cry";
    case SignalKind::VictimShout: return "victim_shout";
  }
  throw Error(ErrorCode::UnknownKind, "unknown signal kind");
}

Waveform gen_signal(SignalKind kind, double duration_s, std::uint64_t seed, const GeneratorConfig& cfg) {
  if (!(duration_s > 0.0)) throw Error(ErrorCode::LengthMismatch, "duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * cfg.fs));
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case SignalKind::Rotor: return rotor_noise(n, rng, cfg);
    case SignalKind::EnvDesert: return desert_noise(n, rng, cfg);
    case SignalKind::EnvForest: return forest_noise(n, rng, cfg);
    case SignalKind::VictimCry:
      return vocalization(n, rng, VoiceShape{cfg.cry_f0_lo, cfg.cry_f0_hi, {1000.0, 2300.0, 3500.0}}, cfg.fs);
    case SignalKind::VictimShout:
      return vocalization(n, rng, VoiceShape{cfg.shout_f0_lo, cfg.shout_f0_hi, {700.0, 1200.0, 2600.0}}, cfg.fs);
  }
  throw Error(ErrorCode::UnknownKind, "unknown signal kind");
}

Waveform gen_background(const ScenarioProfile& profile, double duration_s, std::uint64_t seed,
                        const GeneratorConfig& cfg) {
  const SignalKind env_kind = profile.scenario == Scenario::Desert ? SignalKind::EnvDesert : SignalKind::EnvForest;
  Waveform rotor = set_level(gen_signal(SignalKind::Rotor, duration_s, derive_seed(seed, 1), cfg), profile.rotor_level_db);
  const Waveform env = set_level(gen_signal(env_kind, duration_s, derive_seed(seed, 2), cfg), profile.env_level_db);
  for (std::size_t i = 0; i < rotor.size(); ++i) rotor.samples[i] += env.samples[i];
  return rotor;
}

std::vector<double> fractional_delay(std::span<const double> signal, double delay_samples) {
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const double whole = std::floor(delay_samples);
  const double frac = delay_samples - whole;
  const auto shift = static_cast<std::ptrdiff_t>(whole);
  std::vector<double> out(signal.size(), 0.0);
  if (frac == 0.0) {
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(shift, 0); i < n; ++i) out[static_cast<std::size_t>(i)] = signal[static_cast<std::size_t>(i - shift)];
    return out;
  }
  // y[i] = sum_j h[j] x[i - shift - j], h[j] = sinc(j - frac) * window(j - frac).
  double taps[2 * kSincHalfWidth];
  for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
    const double x = j - frac;
    taps[j + kSincHalfWidth - 1] = sinc(x) * blackman(x);
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
      const std::ptrdiff_t k = i - shift - j;
      if (k >= 0 && k < n) acc += taps[j + kSincHalfWidth - 1] * signal[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

MultiChannelClip propagate(const Vec3& source, const PosedArray& posed, const Waveform& signal,
                           const ScenarioProfile& profile, double speed_of_sound) {
  MultiChannelClip clip;
  clip.channels.reserve(static_cast<std::size_t>(posed.count()));
  for (int m = 0; m < posed.count(); ++m) {
    const double d = (source - posed.world(m)).norm();
    if (!(d > 0.01)) {
      throw Error(ErrorCode::SourceTooClose, "source within 1 cm of mic " + std::to_string(m));
    }
    const double gain = std::pow(d, -profile.alpha);
    std::vector<double> delayed = fractional_delay(signal.samples, d / speed_of_sound * signal.fs);
    for (double& v : delayed) v *= gain;
    clip.channels.push_back(Waveform{std::move(delayed), signal.fs});
  }
  return clip;
}

std::pair<MultiChannelClip, LabelInterval> compose_test_clip(const MultiChannelClip& background,
                                                             const MultiChannelClip& victim,
                                                             double inject_at) {
  background.validate();
  victim.validate();
  if (background.count() != victim.count() || background.fs() != victim.fs()) {
    throw Error(ErrorCode::ChannelMismatch, "victim and background layouts differ");
  }
  const double fs = background.fs();
  const double latest = background.duration() - victim.duration();
  if (!(inject_at >= 0.0) || inject_at > latest + 0.5 / fs) {
    throw Error(ErrorCode::InjectionOutOfRange, "injection at " + std::to_string(inject_at) + " s");
  }
  const auto offset = static_cast<std::size_t>(std::llround(inject_at * fs));
  MultiChannelClip out = background;
  for (int m = 0; m < out.count(); ++m) {
    auto& dst = out.channels[static_cast<std::size_t>(m)].samples;
    const auto& src = victim.channels[static_cast<std::size_t>(m)].samples;
    for (std::size_t i = 0; i < src.size() && offset + i < dst.size(); ++i) dst[offset + i] += src[i];
  }
  const double begin = background.start_time + static_cast<double>(offset) / fs;
  return {std::move(out), LabelInterval{begin, begin + victim.duration()}};
}

Waveform make_victim_audio(std::uint64_t seed, double level_db, const GeneratorConfig& cfg) {
  Rng rng(derive_seed(seed, 0x71c));
  Waveform out{{}, cfg.fs};
  for (int part = 0; part < 2; ++part) {
    const SignalKind kind = (rng() & 1U) ? SignalKind::VictimCry : SignalKind::VictimShout;
    const Waveform w = gen_signal(kind, 1.0, rng(), cfg);
    out.samples.insert(out.samples.end(), w.samples.begin(), w.samples.end());
  }
  return set_level(out, level_db);
}

}  // namespace skyear
