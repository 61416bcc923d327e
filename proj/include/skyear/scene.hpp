#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skyear/geometry.hpp"

namespace skyear {

inline constexpr double kSampleRate = 16000.0;
inline constexpr double kSpeedOfSound = 343.0;
// 94 dB SPL corresponds to 1 Pa RMS.
inline constexpr double kReferenceLevelDb = 94.0;

struct Waveform {
  std::vector<double> samples;
  double fs = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / fs; }
};

double rms(std::span<const double> samples);
inline double rms(const Waveform& w) { return rms(w.samples); }

double pascals_for_level(double level_db);
double level_for_pascals(double rms_pa);

// M aligned channels sharing one sample rate and start time.
struct MultiChannelClip {
  std::vector<Waveform> channels;
  double start_time = 0.0;

  int count() const { return static_cast<int>(channels.size()); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  double fs() const { return channels.empty() ? kSampleRate : channels.front().fs; }
  double duration() const { return static_cast<double>(length()) / fs(); }

  // Throws ChannelMismatch when lengths or rates differ across channels.
  void validate() const;
  MultiChannelClip slice(std::size_t offset, std::size_t count) const;
};

MultiChannelClip mono_clip(Waveform w, double start_time = 0.0);

enum class Scenario { Desert, Forest };

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);

struct ScenarioProfile {
  Scenario scenario = Scenario::Desert;
  double alpha = 2.0;            // path-loss exponent
  double env_level_db = 25.0;    // environment noise at the sensor
  double rotor_level_db = 75.0;  // UAV ego-noise at the sensor
  double victim_level_db = 120.0;
  double threshold = 1.57;       // Sentinel D_th

  std::string_view name() const { return scenario_name(scenario); }
};

ScenarioProfile scenario_profile(Scenario s);

Waveform set_level(const Waveform& w, double target_db);

enum class SignalKind { Rotor, EnvDesert, EnvForest, VictimCry, VictimShout };

SignalKind parse_signal_kind(std::string_view name);
std::string_view signal_kind_name(SignalKind kind);

struct GeneratorConfig {
  double fs = kSampleRate;
  double rotor_fundamental_hz = 180.0;
  int rotor_harmonics = 8;
  double rotor_broadband_db = -20.0;  // relative to the harmonic stack
  double bird_rate_hz = 2.5;          // forest chirp events per second
  double cry_f0_lo = 350.0, cry_f0_hi = 600.0;
  double shout_f0_lo = 150.0, shout_f0_hi = 300.0;
};

// Deterministic synthetic surrogate for each signal class, RMS normalized to 1.
Waveform gen_signal(SignalKind kind, double duration_s, std::uint64_t seed,
                    const GeneratorConfig& cfg = {});

// Rotor plus environment noise for one channel, each calibrated to the profile levels.
Waveform gen_background(const ScenarioProfile& profile, double duration_s, std::uint64_t seed,
                        const GeneratorConfig& cfg = {});

// Point source propagated to every mic: per-mic fractional delay d_m / v_s
// (windowed sinc, 32 taps each side) and gain 1 / d_m^alpha. Sample n of every
// output channel is received at time n / fs when sample 0 of `signal` is
// emitted at time 0.
MultiChannelClip propagate(const Vec3& source, const PosedArray& posed, const Waveform& signal,
                           const ScenarioProfile& profile, double speed_of_sound = kSpeedOfSound);

// Delay `signal` by `delay_samples` (any real >= 0) with the same kernel propagate uses.
std::vector<double> fractional_delay(std::span<const double> signal, double delay_samples);

struct LabelInterval {
  double begin = 0.0;
  double end = 0.0;

  bool overlaps(double t0, double t1) const { return t0 < end && begin < t1; }
};

// Sum `victim` into `background` starting at `inject_at` seconds.
std::pair<MultiChannelClip, LabelInterval> compose_test_clip(const MultiChannelClip& background,
                                                             const MultiChannelClip& victim,
                                                             double inject_at);

// Two independently drawn 1 s vocalizations, concatenated and set to the victim level.
Waveform make_victim_audio(std::uint64_t seed, double level_db, const GeneratorConfig& cfg = {});

}  // namespace skyear
