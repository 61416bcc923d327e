#include <algorithm>
#include <cmath>
#include <numeric>

#include "skyear/error.hpp"
#include "skyear/mission.hpp"
#include "skyear/rng.hpp"

namespace skyear {

namespace {

constexpr std::uint64_t kBackgroundTag = 1;
constexpr std::uint64_t kVictimTag = 2;
constexpr std::uint64_t kInjectTag = 3;
constexpr std::uint64_t kClipTag = 100;

Waveform victim_at(std::uint64_t seed, const ScenarioProfile& profile, double distance, const GeneratorConfig& gen) {
  Waveform v = make_victim_audio(seed, profile.victim_level_db, gen);
  const double g = std::pow(distance, -profile.alpha);
  for (double& x : v.samples) x *= g;
  return v;
}

Waveform clip_of(const Waveform& w, std::size_t offset, std::size_t n) {
  Waveform out{{}, w.fs};
  out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                     w.samples.begin() + static_cast<std::ptrdiff_t>(offset + n));
  return out;
}

}  // namespace

DetectionResult eval_detection(const ClipScorer& scorer, const DetectionSetup& setup) {
  if (setup.n_trials < 1) throw Error(ErrorCode::ConfigError, "n_trials must be at least 1");
  if (!(setup.altitude > 0)) throw Error(ErrorCode::ConfigError, "altitude must be positive");
  const double fs = setup.generator.fs;
  const auto n = static_cast<std::size_t>(setup.clip_samples);
  int hits = 0, alarms = 0, successes = 0;

  for (int trial = 0; trial < setup.n_trials; ++trial) {
    const std::uint64_t ts = derive_seed(setup.seed, static_cast<std::uint64_t>(trial));
    const Waveform bg =
        gen_background(setup.profile, setup.clip_length_s, derive_seed(ts, kBackgroundTag), setup.generator);
    const Waveform victim = victim_at(derive_seed(ts, kVictimTag), setup.profile, setup.altitude, setup.generator);
    Rng rng(derive_seed(ts, kInjectTag));
    const double inject_at = uniform(rng, 0.0, setup.clip_length_s - victim.duration());
    const auto [mixed, label] = compose_test_clip(mono_clip(bg), mono_clip(victim), inject_at);

    bool hit = false, control_alarm = false, control_done = false;
    const std::size_t clips = bg.size() / n;
    for (std::size_t c = 0; c < clips; ++c) {
      const double t0 = static_cast<double>(c * n) / fs, t1 = static_cast<double>((c + 1) * n) / fs;
      if (!label.overlaps(t0, t1)) continue;
      const std::uint64_t seed = derive_seed(ts, kClipTag + c);
      if (!hit) {
        const double score = scorer(clip_of(mixed.channels[0], c * n, n), ClipContext{seed, t0, true});
        hit = score > setup.threshold;
      }
      if (!control_done) {
        // Same clip and mask seed, victim removed.
        const double score = scorer(clip_of(bg, c * n, n), ClipContext{seed, t0, false});
        control_alarm = score > setup.threshold;
        control_done = true;
      }
    }
    hits += hit;
    alarms += control_alarm;
    successes += hit && !control_alarm;
  }
  DetectionResult r;
  r.n_trials = setup.n_trials;
  r.accuracy = static_cast<double>(successes) / setup.n_trials;
  r.hit_rate = static_cast<double>(hits) / setup.n_trials;
  r.false_alarm_rate = static_cast<double>(alarms) / setup.n_trials;
  return r;
}

ScorePairs score_pairs(const ClipScorer& scorer, const ScenarioProfile& profile, double distance, int n,
                       std::uint64_t seed, int clip_samples, const GeneratorConfig& gen) {
  ScorePairs out;
  const auto len = static_cast<std::size_t>(clip_samples);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(i));
    Waveform bg = gen_background(profile, static_cast<double>(clip_samples) / gen.fs, derive_seed(ts, kBackgroundTag), gen);
    bg.samples.resize(len, 0.0);
    const Waveform victim = victim_at(derive_seed(ts, kVictimTag), profile, distance, gen);
    Waveform mix = bg;
    for (std::size_t k = 0; k < len && k < victim.size(); ++k) mix.samples[k] += victim.samples[k];
    const std::uint64_t mask_seed = derive_seed(ts, kClipTag);
    out.noise.push_back(scorer(bg, ClipContext{mask_seed, 0.0, false}));
    out.victim.push_back(scorer(mix, ClipContext{mask_seed, 0.0, true}));
  }
  return out;
}

double roc_auc(const std::vector<double>& negatives, const std::vector<double>& positives) {
  if (negatives.empty() || positives.empty()) throw Error(ErrorCode::ConfigError, "AUC needs both classes");
  double wins = 0.0;
  for (double p : positives) {
    for (double q : negatives) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(negatives.size()) * static_cast<double>(positives.size()));
}

double calibrate_threshold(const ClipScorer& scorer, const ScenarioProfile& profile, int n, std::uint64_t seed,
                           int clip_samples, const GeneratorConfig& gen) {
  if (n < 2) throw Error(ErrorCode::ConfigError, "calibration needs at least two clips");
  std::vector<double> scores;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(i));
    Waveform bg = gen_background(profile, static_cast<double>(clip_samples) / gen.fs, derive_seed(ts, kBackgroundTag), gen);
    bg.samples.resize(static_cast<std::size_t>(clip_samples), 0.0);
    scores.push_back(scorer(bg, ClipContext{derive_seed(ts, kClipTag), 0.0, false}));
  }
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / (n - 1));
  return *std::max_element(scores.begin(), scores.end()) + sd;
}

}  // namespace skyear
