#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skyear/fusion.hpp"
#include "skyear/geometry.hpp"
#include "skyear/mae.hpp"
#include "skyear/scene.hpp"

namespace skyear {

// What the Sentinel is told about a clip besides its samples. `contains_victim`
// is ground truth, only meant for instrumented stub scorers.
struct ClipContext {
  std::uint64_t seed = 0;
  double start_time = 0.0;
  bool contains_victim = false;
};

// Returns D_re for one single-channel clip.
using ClipScorer = std::function<double(const Waveform&, const ClipContext&)>;

// Scores with a trained model; the model must outlive the returned scorer.
ClipScorer sentinel_scorer(const Sentinel& model);

struct MissionConfig {
  ScenarioProfile profile;
  double altitude = 5.0;
  Vec3 victim = Vec3::Zero();
  std::vector<Vec3> waypoints;  // hover points, visited in order
  double hover_spacing = 10.0;
  double cruise_speed = 4.0;  // m/s between hovers; only shifts the victim's burst phase
  int clip_samples = 16384;   // Sentinel clip, also the recorded dwell per hover
  double retro = 0.5;
  double post = 0.5;
  double buffer_s = 12.0;
  int mics = 7;
  double radius = 0.25;
  double speed_of_sound = kSpeedOfSound;
  double residual_bound = 0.25;
  bool victim_enabled = true;
  double burst_period = 3.0;
  double burst_length = 1.0;
  std::uint64_t seed = 1;
  GeneratorConfig generator;

  // Throws ConfigError.
  void validate() const;
};

// Standard search route at the scenario altitude, with hover points filled in.
MissionConfig default_mission_config(Scenario s, std::uint64_t seed = 1);

inline double default_altitude(Scenario s) { return s == Scenario::Desert ? 5.0 : 15.0; }

// (-500,-4,h) -> (-500,5,h) -> (200,5,h), a hover point every `spacing` metres
// along each leg plus every leg end.
std::vector<Vec3> build_search_trajectory(Scenario s, double spacing = 10.0);
std::vector<Vec3> build_search_trajectory(double altitude, double spacing);

struct HoverRecord {
  int index = 0;
  Vec3 position = Vec3::Zero();
  double time = 0.0;                  // mission clock at hover start
  std::optional<double> snr_db;       // absent when the victim is silent
  double d_re = 0.0;
  bool triggered = false;
  bool victim_in_clip = false;        // ground truth for mic 0
  std::optional<Vec3> doa;
  std::optional<double> weight;
  std::optional<double> ray_distance;  // victim to the observation line
  std::optional<Vec3> fused;
  std::optional<double> error;         // |s* - s_true|, present iff fused is
};

struct MissionCounters {
  long sentinel_scores = 0;
  long gcc_calls = 0;
  long extractions = 0;
  long degenerate_fusions = 0;
};

struct MissionLog {
  std::vector<HoverRecord> hovers;
  std::vector<Observation> observations;
  std::optional<FusedEstimate> final_estimate;
  std::optional<double> final_error;
  MissionCounters counters;

  int triggers() const;
  // Fixed column set; absent values are empty fields.
  std::string to_csv() const;
};

inline const char* const kMissionCsvHeader =
    "hover_idx,x,y,z,snr_db,d_re,triggered,doa_x,doa_y,doa_z,sx,sy,sz,loc_err_m";

MissionLog run_mission(const MissionConfig& cfg, const ClipScorer& scorer, double threshold);
MissionLog run_mission(const MissionConfig& cfg, const Sentinel& model, double threshold);

// Distance from `point` to the line through `origin` along unit `direction`.
double point_to_line_distance(const Vec3& point, const Vec3& origin, const Vec3& direction);

struct DetectionResult {
  double accuracy = 0.0;    // hit and clean control
  double hit_rate = 0.0;    // some overlapping clip triggered
  double false_alarm_rate = 0.0;  // control clip triggered
  int n_trials = 0;
};

struct DetectionSetup {
  ScenarioProfile profile;
  double altitude = 5.0;  // victim directly below, so d = h
  int n_trials = 100;
  double threshold = 1.57;
  std::uint64_t seed = 1;
  double clip_length_s = 12.0;
  int clip_samples = 16384;
  GeneratorConfig generator;
};

// 12 s test clips with a 2 s victim injected at a random time, scanned by
// consecutive Sentinel clips; a trial succeeds when an overlapping clip
// triggers and the victim-free control clip does not.
DetectionResult eval_detection(const ClipScorer& scorer, const DetectionSetup& setup);

struct ScorePairs {
  std::vector<double> noise;
  std::vector<double> victim;
};

// Paired clips: background only, and the same background plus a victim
// vocalization attenuated to `distance`.
ScorePairs score_pairs(const ClipScorer& scorer, const ScenarioProfile& profile, double distance, int n,
                       std::uint64_t seed, int clip_samples = 16384, const GeneratorConfig& gen = {});

// Probability that a random positive outscores a random negative, ties count half.
double roc_auc(const std::vector<double>& negatives, const std::vector<double>& positives);

// D_th from noise-only clips: largest score plus one standard deviation.
double calibrate_threshold(const ClipScorer& scorer, const ScenarioProfile& profile, int n, std::uint64_t seed,
                           int clip_samples = 16384, const GeneratorConfig& gen = {});

}  // namespace skyear
