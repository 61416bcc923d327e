#include "skyear/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "skyear/csv.hpp"
#include "skyear/error.hpp"
#include "skyear/localization.hpp"
#include "skyear/ring_buffer.hpp"
#include "skyear/rng.hpp"

namespace skyear {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kNoiseTag = 0x6e6f697365;
constexpr std::uint64_t kBurstTag = 0x6275727374;
constexpr std::uint64_t kPhaseTag = 0x7068617365;
constexpr std::uint64_t kMaskTag = 0x6d61736b;

// Victim emission: bursts of `burst_length` every `burst_period`, at a random
// phase. Burst waveforms are synthesized on first use.
class EmissionTrack {
 public:
  explicit EmissionTrack(const MissionConfig& cfg) : cfg_(cfg), fs_(cfg.generator.fs) {
    Rng rng(derive_seed(cfg.seed, kPhaseTag));
    phase_ = uniform(rng, 0.0, cfg.burst_period);
    length_ = std::llround(cfg.burst_length * fs_);
  }

  long long burst_start(long long j) const { return std::llround((phase_ + static_cast<double>(j) * cfg_.burst_period) * fs_); }

  // True when any emitted sample falls in [a, a + n).
  bool active(long long a, long long n) const {
    const long long j0 = first_burst(a);
    for (long long j = j0; burst_start(j) < a + n; ++j) {
      if (burst_start(j) + length_ > a) return true;
    }
    return false;
  }

  // Emitted pressure for absolute samples [a, a + n); zero before the first burst.
  std::vector<double> segment(long long a, long long n) {
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (long long j = first_burst(a); burst_start(j) < a + n; ++j) {
      const long long b = burst_start(j);
      if (b + length_ <= a) continue;
      const std::vector<double>& w = burst(j);
      const long long lo = std::max(a, b), hi = std::min(a + n, b + length_);
      for (long long t = lo; t < hi; ++t) out[static_cast<std::size_t>(t - a)] = w[static_cast<std::size_t>(t - b)];
    }
    return out;
  }

 private:
  long long first_burst(long long a) const {
    const double t = static_cast<double>(a) / fs_ - phase_ - cfg_.burst_length;
    return std::max<long long>(0, static_cast<long long>(std::floor(t / cfg_.burst_period)));
  }

  const std::vector<double>& burst(long long j) {
    auto it = cache_.find(j);
    if (it != cache_.end()) return it->second;
    const std::uint64_t s = derive_seed(cfg_.seed, kBurstTag + static_cast<std::uint64_t>(j));
    const SignalKind kind = (s & 1U) ? SignalKind::VictimCry : SignalKind::VictimShout;
    Waveform w = set_level(gen_signal(kind, cfg_.burst_length, s, cfg_.generator), cfg_.profile.victim_level_db);
    w.samples.resize(static_cast<std::size_t>(length_), 0.0);
    return cache_.emplace(j, std::move(w.samples)).first->second;
  }

  const MissionConfig& cfg_;
  double fs_;
  double phase_ = 0.0;
  long long length_ = 0;
  std::map<long long, std::vector<double>> cache_;
};

// Victim pressure received at each mic for absolute samples [start, start + n).
std::vector<std::vector<double>> receive(EmissionTrack& track, const MissionConfig& cfg, const PosedArray& posed,
                                         long long start, long long n) {
  constexpr long long kLead = 40;  // covers the 32-tap kernel reach
  const double fs = cfg.generator.fs;
  std::vector<std::vector<double>> out;
  for (int m = 0; m < posed.count(); ++m) {
    const double d = (cfg.victim - posed.world(m)).norm();
    if (!(d > 0.01)) throw Error(ErrorCode::SourceTooClose, "victim within 1 cm of mic " + std::to_string(m));
    const double delay = d / cfg.speed_of_sound * fs;
    const auto whole = static_cast<long long>(std::floor(delay));
    // seg[i] = e[start - whole - 2 kLead + i]; output sample n0 sits at index n0 + 2 kLead.
    const long long seg_start = start - whole - 2 * kLead;
    const std::vector<double> seg = track.segment(seg_start, n + 3 * kLead);
    std::vector<double> delayed = fractional_delay(seg, delay - static_cast<double>(whole));
    const double gain = std::pow(d, -cfg.profile.alpha);
    std::vector<double> ch(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) ch[static_cast<std::size_t>(i)] = gain * delayed[static_cast<std::size_t>(i + 2 * kLead)];
    out.push_back(std::move(ch));
  }
  return out;
}

}  // namespace

ClipScorer sentinel_scorer(const Sentinel& model) {
  return [&model](const Waveform& clip, const ClipContext& ctx) { return model.detect(clip, 0.0, ctx.seed).score; };
}

void MissionConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (waypoints.empty()) fail("mission has no waypoints");
  if (!(cruise_speed > 0)) fail("cruise_speed must be positive");
  if (clip_samples <= 0) fail("clip_samples must be positive");
  if (!(retro >= 0 && post >= 0)) fail("retro and post must be non-negative");
  if (static_cast<double>(clip_samples) / generator.fs < retro + post) fail("trigger window longer than the hover dwell");
  if (!(buffer_s >= static_cast<double>(clip_samples) / generator.fs)) fail("buffer shorter than one hover");
  if (!(burst_period > 0 && burst_length > 0 && burst_length <= burst_period)) fail("bad victim duty cycle");
  if (!(speed_of_sound > 0)) fail("speed_of_sound must be positive");
}

std::vector<Vec3> build_search_trajectory(double altitude, double spacing) {
  if (!(spacing > 0)) throw Error(ErrorCode::ConfigError, "hover spacing must be positive");
  const Vec3 corners[] = {{-500.0, -4.0, altitude}, {-500.0, 5.0, altitude}, {200.0, 5.0, altitude}};
  std::vector<Vec3> out{corners[0]};
  for (int leg = 0; leg < 2; ++leg) {
    const Vec3 a = corners[leg], b = corners[leg + 1];
    const double len = (b - a).norm();
    const Vec3 dir = (b - a) / len;
    for (int i = 1; static_cast<double>(i) * spacing < len - 1e-9; ++i) out.push_back(a + dir * (i * spacing));
    out.push_back(b);
  }
  return out;
}

std::vector<Vec3> build_search_trajectory(Scenario s, double spacing) {
  return build_search_trajectory(default_altitude(s), spacing);
}

MissionConfig default_mission_config(Scenario s, std::uint64_t seed) {
  MissionConfig cfg;
  cfg.profile = scenario_profile(s);
  cfg.altitude = default_altitude(s);
  cfg.waypoints = build_search_trajectory(cfg.altitude, cfg.hover_spacing);
  cfg.seed = seed;
  return cfg;
}

double point_to_line_distance(const Vec3& point, const Vec3& origin, const Vec3& direction) {
  return (projector(direction.normalized()) * (point - origin)).norm();
}

int MissionLog::triggers() const {
  return static_cast<int>(std::count_if(hovers.begin(), hovers.end(), [](const HoverRecord& h) { return h.triggered; }));
}

std::string MissionLog::to_csv() const {
  std::vector<std::string> header;
  {
    std::string h = kMissionCsvHeader;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = h.find(',', pos);
      header.push_back(h.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }
  csv::Table table(std::move(header));
  auto vec = [](const std::optional<Vec3>& v, int i) {
    return v ? csv::number((*v)(i)) : std::string();
  };
  for (const HoverRecord& h : hovers) {
    table.add({csv::integer(h.index), csv::number(h.position.x()), csv::number(h.position.y()),
               csv::number(h.position.z()), csv::number(h.snr_db), csv::number(h.d_re), h.triggered ? "1" : "0",
               vec(h.doa, 0), vec(h.doa, 1), vec(h.doa, 2), vec(h.fused, 0), vec(h.fused, 1), vec(h.fused, 2),
               csv::number(h.error)});
  }
  return table.str();
}

MissionLog run_mission(const MissionConfig& cfg, const ClipScorer& scorer, double threshold) {
  cfg.validate();
  const double fs = cfg.generator.fs;
  const long long n = cfg.clip_samples;
  const MicArray array = build_circular_array(cfg.mics, cfg.radius);
  const double max_lag = default_max_lag(array, cfg.speed_of_sound);
  const double victim_pa = pascals_for_level(cfg.profile.victim_level_db);

  RingBuffer buffer(cfg.mics, fs, cfg.buffer_s);
  EmissionTrack track(cfg);
  MissionLog log;

  double mission_time = 0.0;
  for (std::size_t k = 0; k < cfg.waypoints.size(); ++k) {
    const Vec3& p = cfg.waypoints[k];
    if (k > 0) mission_time += static_cast<double>(n) / fs + (p - cfg.waypoints[k - 1]).norm() / cfg.cruise_speed;
    const long long start = std::llround(mission_time * fs);
    const PosedArray posed = pose_at(array, p);

    HoverRecord rec;
    rec.index = static_cast<int>(k);
    rec.position = p;
    rec.time = mission_time;

    // Diffuse background: every mic gets its own rotor + environment realization.
    MultiChannelClip clip;
    clip.start_time = buffer.clock();
    for (int m = 0; m < cfg.mics; ++m) {
      const std::uint64_t s = derive_seed(derive_seed(cfg.seed, kNoiseTag), k * 1024 + static_cast<std::uint64_t>(m));
      Waveform w = gen_background(cfg.profile, static_cast<double>(n) / fs, s, cfg.generator);
      w.samples.resize(static_cast<std::size_t>(n), 0.0);
      clip.channels.push_back(std::move(w));
    }

    if (cfg.victim_enabled) {
      const double d0 = (cfg.victim - p).norm();
      const double signal = victim_pa * std::pow(d0, -cfg.profile.alpha);
      rec.snr_db = 20.0 * std::log10(signal / rms(clip.channels[0]));
      const long long arrival = start - static_cast<long long>(std::ceil(d0 / cfg.speed_of_sound * fs));
      if (track.active(arrival - 64, n + 128)) {
        const auto received = receive(track, cfg, posed, start, n);
        for (int m = 0; m < cfg.mics; ++m) {
          auto& dst = clip.channels[static_cast<std::size_t>(m)].samples;
          const auto& src = received[static_cast<std::size_t>(m)];
          for (long long i = 0; i < n; ++i) dst[static_cast<std::size_t>(i)] += src[static_cast<std::size_t>(i)];
          if (m == 0) rec.victim_in_clip = std::any_of(src.begin(), src.end(), [](double v) { return v != 0.0; });
        }
      }
    }

    const double hover_begin = buffer.clock();
    buffer.push(clip);

    const ClipContext ctx{derive_seed(derive_seed(cfg.seed, kMaskTag), static_cast<std::uint64_t>(start)), mission_time,
                          rec.victim_in_clip};
    rec.d_re = scorer(clip.channels[0], ctx);
    ++log.counters.sentinel_scores;
    rec.triggered = make_verdict(rec.d_re, threshold).triggered;

    if (rec.triggered) {
      const double t_trig = hover_begin + static_cast<double>(n) / (2.0 * fs);
      const MultiChannelClip window = buffer.extract(t_trig, cfg.retro, cfg.post);
      ++log.counters.extractions;
      const TdoaSet tdoas = compute_tdoas(window, max_lag);
      log.counters.gcc_calls += cfg.mics - 1;
      const DoAEstimate doa = solve_doa(posed, tdoas, cfg.speed_of_sound, cfg.residual_bound);
      rec.doa = doa.direction;
      rec.weight = observation_weight(tdoas);
      rec.ray_distance = point_to_line_distance(cfg.victim, p, doa.direction);
      log.observations.push_back(Observation{p, doa.direction, *rec.weight, mission_time});
      if (log.observations.size() >= 2) {
        try {
          const FusedEstimate est = fuse(log.observations);
          rec.fused = est.position;
          rec.error = (est.position - cfg.victim).norm();
          log.final_estimate = est;
          log.final_error = rec.error;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateGeometry) throw;
          ++log.counters.degenerate_fusions;
        }
      }
    }
    log.hovers.push_back(std::move(rec));
  }
  return log;
}

MissionLog run_mission(const MissionConfig& cfg, const Sentinel& model, double threshold) {
  if (model.mel_config().clip_samples != cfg.clip_samples) {
    throw Error(ErrorCode::ConfigError, "mission clip length differs from the model's");
  }
  return run_mission(cfg, sentinel_scorer(model), threshold);
}

}  // namespace skyear
