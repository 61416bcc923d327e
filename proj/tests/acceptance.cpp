// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Takes about 20 minutes on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "skyear/commands.hpp"
#include "skyear/csv.hpp"
#include "skyear/error.hpp"
#include "skyear/fusion.hpp"
#include "skyear/localization.hpp"
#include "skyear/mae.hpp"
#include "skyear/mission.hpp"
#include "skyear/ring_buffer.hpp"
#include "skyear/rng.hpp"
#include "skyear/scene.hpp"

using namespace skyear;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [failed]");
  }
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

int failures = 0;

void report(int n, const char* title, const Outcome& o) {
  std::printf("criterion %d (%s): %s  %s\n", n, title, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

Waveform white(std::size_t n, Rng& rng) {
  Waveform w;
  w.samples.resize(n);
  for (double& v : w.samples) v = gaussian(rng);
  return w;
}

// ---------------------------------------------------------------------------

Outcome doa_oracle_equivalence() {
  const MicArray array = build_circular_array(7, 0.25);
  const double max_lag = default_max_lag(array);
  Rng rng(101);
  std::vector<double> vs_oracle, vs_truth;
  double solver_time = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double d = uniform(rng, 50, 500);
    const double el = uniform(rng, 20, 89) * std::numbers::pi / 180;
    const Vec3 u = oracle::from_angles(uniform(rng, 0, 2 * std::numbers::pi), el);
    const PosedArray posed = pose_at(array, Vec3(uniform(rng, -100, 100), uniform(rng, -100, 100), uniform(rng, 5, 40)));
    const Vec3 src = posed.position() + d * u;

    // Long enough that every channel is fully covered after the propagation delay.
    const std::size_t n = 16000;
    const auto lead = static_cast<std::size_t>(std::ceil((d + 1) / kSpeedOfSound * kSampleRate)) + 64;
    const Waveform s = gen_signal(SignalKind::VictimCry, static_cast<double>(n + lead) / kSampleRate, 500 + i);
    MultiChannelClip clip = propagate(src, posed, s, scenario_profile(Scenario::Desert));
    clip = clip.slice(clip.length() - n, n);
    for (auto& ch : clip.channels) {
      const double sigma = rms(ch) * std::pow(10.0, -20.0 / 20);
      for (double& v : ch.samples) v += sigma * gaussian(rng);
    }

    const auto t0 = Clock::now();
    const TdoaSet tdoas = compute_tdoas(clip, max_lag);
    const DoAEstimate est = solve_doa(posed, tdoas);
    solver_time += seconds_since(t0);

    vs_oracle.push_back(oracle::angle_deg(est.direction, oracle::doa_grid_search(posed, tdoas, kSpeedOfSound)));
    vs_truth.push_back(oracle::angle_deg(est.direction, u));
  }
  Outcome o;
  const double med = quantile(vs_oracle, 0.5), p95 = quantile(vs_oracle, 0.95);
  o.require(med <= 2.0, "median vs grid " + fmt(med) + " deg <= 2");
  o.require(p95 <= 5.0, "p95 vs grid " + fmt(p95) + " deg <= 5");
  o.require(solver_time < 5.0, "runtime " + fmt(solver_time) + " s < 5");
  o.detail += " (median vs truth " + fmt(quantile(vs_truth, 0.5)) + " deg)";
  return o;
}

// ---------------------------------------------------------------------------

// Independent fractional shift: Blackman-windowed sinc with a wide support.
std::vector<double> sinc_shift(const std::vector<double>& s, double delay, int half) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = static_cast<double>(i) - delay;
    const auto c = static_cast<long>(std::floor(t));
    double acc = 0.0;
    for (long j = c - half; j <= c + half + 1; ++j) {
      if (j < 0 || j >= static_cast<long>(s.size())) continue;
      const double x = t - static_cast<double>(j);
      if (std::abs(x) > half + 1) continue;
      const double sinc = x == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double w = 0.42 + 0.5 * std::cos(std::numbers::pi * x / (half + 1)) +
                       0.08 * std::cos(2 * std::numbers::pi * x / (half + 1));
      acc += s[static_cast<std::size_t>(j)] * sinc * w;
    }
    out[i] = acc;
  }
  return out;
}

Outcome gcc_phat_accuracy() {
  Rng rng(202);
  const double max_lag = 24.0 / kSampleRate;
  int integer_exact = 0, integer_cases = 0;
  double integer_refined = 0.0;
  for (int d = -20; d <= 20; ++d) {
    const Waveform base = white(4096 + 64, rng);
    Waveform x, ref;
    x.samples.assign(base.samples.begin() + 32 - d, base.samples.begin() + 32 - d + 4096);
    ref.samples.assign(base.samples.begin() + 32, base.samples.begin() + 32 + 4096);
    const TdoaEstimate e = gcc_phat(x, ref, max_lag);
    integer_exact += e.lag == d;
    integer_refined = std::max(integer_refined, std::abs(e.tdoa * kSampleRate - d));
    ++integer_cases;
  }

  std::vector<double> errors;
  const int half = 64;
  for (int i = 0; i < 500; ++i) {
    const double d = uniform(rng, -16, 16);
    const double snr_db = uniform(rng, 10, 30);
    const std::size_t n = 4096, pad = 2 * half + 32;
    const Waveform base = white(n + 2 * pad, rng);
    const std::vector<double> moved = sinc_shift(base.samples, d, half);
    Waveform x, ref;
    x.samples.assign(moved.begin() + static_cast<long>(pad), moved.begin() + static_cast<long>(pad + n));
    ref.samples.assign(base.samples.begin() + static_cast<long>(pad), base.samples.begin() + static_cast<long>(pad + n));
    for (Waveform* w : {&x, &ref}) {
      const double sigma = rms(*w) * std::pow(10.0, -snr_db / 20);
      for (double& v : w->samples) v += sigma * gaussian(rng);
    }
    errors.push_back(std::abs(gcc_phat(x, ref, max_lag).tdoa * kSampleRate - d));
  }
  Outcome o;
  o.require(integer_exact == integer_cases,
            std::to_string(integer_exact) + "/" + std::to_string(integer_cases) + " integer lags exact");
  o.require(integer_refined <= 0.05, "refined integer delays within " + fmt(integer_refined) + " samples <= 0.05");
  const double worst = *std::max_element(errors.begin(), errors.end());
  o.require(worst <= 0.2, "fractional worst " + fmt(worst) + " samples <= 0.2 over 500 cases (median " +
                              fmt(quantile(errors, 0.5)) + ")");
  return o;
}

// ---------------------------------------------------------------------------

Vec3 random_unit(Rng& rng) { return Vec3(gaussian(rng), gaussian(rng), gaussian(rng)).normalized(); }

std::vector<Observation> rays_to(const Vec3& target, int k, double noise, Rng& rng) {
  std::vector<Observation> obs;
  for (int i = 0; i < k; ++i) {
    const Vec3 p(uniform(rng, -60, 60), uniform(rng, -60, 60), uniform(rng, 5, 30));
    const Vec3 u = ((target - p).normalized() + noise * random_unit(rng)).normalized();
    obs.push_back(Observation{p, u, uniform(rng, 0.1, 1.0), static_cast<double>(i)});
  }
  return obs;
}

Outcome fusion_oracle_equivalence() {
  Rng rng(303);
  double worst_grid = 0.0, worst_exact = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 s(uniform(rng, -20, 20), uniform(rng, -20, 20), uniform(rng, -2, 0));
    const int k = 2 + static_cast<int>(uniform_index(rng, 7));
    const std::vector<Observation> obs = rays_to(s, k, 0.05, rng);
    Vec3 centroid = Vec3::Zero();
    for (const auto& o : obs) centroid += o.position / k;
    const Vec3 ref = oracle::fusion_grid_search(obs, centroid, 128.0);
    worst_grid = std::max(worst_grid, (fuse(obs).position - ref).norm());
  }
  for (int i = 0; i < 100; ++i) {
    const Vec3 s(uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -5, 0));
    const std::vector<Observation> obs = rays_to(s, 2 + static_cast<int>(uniform_index(rng, 7)), 0.0, rng);
    worst_exact = std::max(worst_exact, (fuse(obs).position - s).norm());
  }
  int degenerate = 0;
  const int parallel_cases = 20;
  for (int i = 0; i < parallel_cases; ++i) {
    const Vec3 u = random_unit(rng);
    std::vector<Observation> obs;
    const int k = 2 + static_cast<int>(uniform_index(rng, 7));
    for (int j = 0; j < k; ++j) {
      // Some rays point the opposite way along the same axis.
      obs.push_back(Observation{Vec3(uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, 5, 30)),
                                j % 3 == 2 ? Vec3(-u) : u, uniform(rng, 0.1, 1.0), 0.0});
    }
    try {
      fuse(obs);
    } catch (const Error& e) {
      degenerate += e.code() == ErrorCode::DegenerateGeometry;
    }
  }
  Outcome o;
  o.require(worst_grid <= 1e-3, "worst |fuse - grid| " + fmt(worst_grid) + " m <= 1e-3 over 100 scenes");
  o.require(worst_exact <= 1e-9, "exact intersections within " + fmt(worst_exact) + " m <= 1e-9");
  o.require(degenerate == parallel_cases,
            std::to_string(degenerate) + "/" + std::to_string(parallel_cases) + " parallel sets raise DegenerateGeometry");
  return o;
}

// ---------------------------------------------------------------------------

Outcome mae_correctness() {
  Outcome o;
  const oracle::GradientReport all = oracle::gradient_check(oracle::tiny_mae_config(), 7, LossPatches::All);
  const oracle::GradientReport masked = oracle::gradient_check(oracle::tiny_mae_config(), 8, LossPatches::Masked);
  const double worst = std::max(all.worst, masked.worst);
  o.require(worst <= 1e-4, "gradient max rel error " + fmt(worst) + " <= 1e-4 over " + std::to_string(all.groups) +
                               " tensors");

  const MaeConfig base;
  const PatchGrid grid = oracle::random_grid(base, 11);
  bool shapes = true;
  for (int i = 0; i <= 9; ++i) {
    MaeConfig cfg = base;
    cfg.mask_ratio = i / 10.0;
    const MaeParams p = init_params(cfg, 3);
    const MaskPartition m = sample_mask(cfg.tokens(), cfg.mask_ratio, 4);
    const auto hidden = static_cast<std::size_t>(std::llround(cfg.tokens() * cfg.mask_ratio));
    shapes &= m.masked.size() == hidden && m.visible.size() + hidden == 128;
    const Eigen::MatrixXd z = encode(grid, m, p);
    shapes &= z.rows() == static_cast<Eigen::Index>(128 - hidden + 1) && z.cols() == cfg.embed_dim;
    const PatchGrid r = decode(z, m, p);
    shapes &= r.patches.rows() == 128 && r.patches.cols() == 64 && r.patches.allFinite();
    const ScoreResult sc = anomaly_score(grid, r, cfg.top_k);
    shapes &= sc.errors.size() == 128 && sc.top.size() == 13;
  }
  o.require(shapes, "shape invariants for rho 0..0.9");

  // Permuting tokens together with their positional embeddings permutes the encoder output.
  const MaeParams p = init_params(base, 4);
  Rng rng(6);
  std::vector<int> perm(128);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  PatchGrid g2 = grid;
  MaeParams p2 = p;
  for (int i = 0; i < 128; ++i) {
    g2.patches.row(i) = grid.patches.row(perm[static_cast<std::size_t>(i)]);
    p2.enc_pos.row(i) = p.enc_pos.row(perm[static_cast<std::size_t>(i)]);
  }
  double worst_eq = 0.0;
  for (double rho : {0.0, 0.1, 0.5}) {
    const MaskPartition m = sample_mask(128, rho, 9);
    std::vector<bool> visible(128, false);
    for (int v : m.visible) visible[static_cast<std::size_t>(v)] = true;
    MaskPartition m2;
    m2.ratio = rho;
    for (int i = 0; i < 128; ++i) (visible[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ? m2.visible : m2.masked).push_back(i);
    const Eigen::MatrixXd z1 = encode(grid, m, p), z2 = encode(g2, m2, p2);
    auto row_of = [](const MaskPartition& mk, int q) {
      return 1 + static_cast<int>(std::lower_bound(mk.visible.begin(), mk.visible.end(), q) - mk.visible.begin());
    };
    worst_eq = std::max(worst_eq, (z1.row(0) - z2.row(0)).cwiseAbs().maxCoeff());
    for (int i : m2.visible) {
      const int q = perm[static_cast<std::size_t>(i)];
      worst_eq = std::max(worst_eq, (z2.row(row_of(m2, i)) - z1.row(row_of(m, q))).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst_eq <= 1e-6, "permutation equivariance " + fmt(worst_eq) + " <= 1e-6");
  return o;
}

// ---------------------------------------------------------------------------

struct TrainedModel {
  Checkpoint checkpoint;
  double train_seconds = 0.0;
};

TrainedModel train_scenario(Scenario s, std::uint64_t seed) {
  const ScenarioProfile profile = scenario_profile(s);
  const MelConfig mel;
  MaeConfig cfg;
  cfg.mask_ratio = 0.10;
  const auto t0 = Clock::now();
  std::vector<Waveform> clips;
  for (int i = 0; i < 200; ++i) clips.push_back(gen_background(profile, mel.clip_duration(), derive_seed(seed, i)));
  const TrainResult r = pretrain(init_params(cfg, seed), prepare_training_set(clips, mel, cfg.patch), TrainHyper{});
  TrainedModel out;
  out.train_seconds = seconds_since(t0);
  out.checkpoint.params = r.params;
  out.checkpoint.mel = mel;
  const Sentinel model(r.params, mel);
  out.checkpoint.threshold = calibrate_threshold(sentinel_scorer(model), profile, 200, derive_seed(seed, 0xca1));
  std::printf("  trained %s in %.0f s, loss %.3f -> %.3f, threshold %.4f\n", std::string(profile.name()).c_str(),
              out.train_seconds, r.epoch_loss.front(), r.epoch_loss.back(), out.checkpoint.threshold);
  std::fflush(stdout);
  return out;
}

double accuracy_at(const Checkpoint& c, Scenario s, double h) {
  const Sentinel model(c.params, c.mel);
  DetectionSetup setup;
  setup.profile = scenario_profile(s);
  setup.altitude = h;
  setup.n_trials = 100;
  setup.threshold = c.threshold;
  setup.seed = 0x5eed;
  const DetectionResult r = eval_detection(sentinel_scorer(model), setup);
  std::printf("  %s h=%g m: accuracy %.2f (hit %.2f, false alarm %.2f)\n", std::string(setup.profile.name()).c_str(), h,
              r.accuracy, r.hit_rate, r.false_alarm_rate);
  std::fflush(stdout);
  return r.accuracy;
}

Outcome detection_capability(const TrainedModel& desert, const TrainedModel& forest) {
  Outcome o;
  const double total = desert.train_seconds + forest.train_seconds;
  o.require(total < 1800, "training 2x200 clips took " + fmt(total) + " s < 1800");

  const Sentinel model(desert.checkpoint.params, desert.checkpoint.mel);
  const ScorePairs pairs = score_pairs(sentinel_scorer(model), scenario_profile(Scenario::Desert), 5.0, 100, 0xa0c);
  const double auc = roc_auc(pairs.noise, pairs.victim);
  o.require(auc >= 0.9, "desert AUC at 5 m " + fmt(auc) + " >= 0.9 (100+100)");
  for (double d : {10.0, 20.0}) {
    const ScorePairs far = score_pairs(sentinel_scorer(model), scenario_profile(Scenario::Desert), d, 100, 0xa0c);
    std::printf("  info: desert AUC at %g m %.3f\n", d, roc_auc(far.noise, far.victim));
  }

  const double d5 = accuracy_at(desert.checkpoint, Scenario::Desert, 5);
  const double d20 = accuracy_at(desert.checkpoint, Scenario::Desert, 20);
  const double f15 = accuracy_at(forest.checkpoint, Scenario::Forest, 15);
  const double f50 = accuracy_at(forest.checkpoint, Scenario::Forest, 50);
  o.require(d5 >= d20, "desert acc h=5 " + fmt(d5) + " >= h=20 " + fmt(d20));
  o.require(f15 >= f50, "forest acc h=15 " + fmt(f15) + " >= h=50 " + fmt(f50));
  return o;
}

// ---------------------------------------------------------------------------

Outcome mission_end_to_end(const Checkpoint& desert) {
  const Sentinel model(desert.params, desert.mel);
  Outcome o;

  MissionConfig silent = default_mission_config(Scenario::Desert, 1);
  silent.victim_enabled = false;
  const MissionLog quiet = run_mission(silent, model, desert.threshold);
  o.require(quiet.triggers() == 0, std::to_string(quiet.triggers()) + " triggers with the victim silent");

  int passes = 0, late_starts = 0, with_triggers = 0, fused_runs = 0, monotone = 0, monotone_eligible = 0;
  double slowest = 0.0, trigger_total = 0.0;
  for (int run = 0; run < 50; ++run) {
    const MissionConfig cfg = default_mission_config(Scenario::Desert, 1000 + static_cast<std::uint64_t>(run));
    const auto t0 = Clock::now();
    const MissionLog log = run_mission(cfg, model, desert.threshold);
    slowest = std::max(slowest, seconds_since(t0));
    trigger_total += log.triggers();

    std::vector<double> rays, errors;
    const HoverRecord* first = nullptr;
    for (const HoverRecord& h : log.hovers) {
      if (!h.triggered) continue;
      if (!first) first = &h;
      rays.push_back(*h.ray_distance);
      if (h.error && rays.size() > 3) errors.push_back(*h.error);
    }
    if (first) {
      ++with_triggers;
      // The first alarm must come after the at-mic SNR has climbed well off its starting floor.
      late_starts += *first->snr_db >= *log.hovers.front().snr_db + 20.0;
    }
    if (log.final_error) {
      ++fused_runs;
      passes += *log.final_error <= quantile(rays, 0.5);
    }
    if (errors.size() >= 2) {
      ++monotone_eligible;
      monotone += std::is_sorted(errors.rbegin(), errors.rend());
    }
  }
  o.require(late_starts == with_triggers, "first trigger after SNR rise in " + std::to_string(late_starts) + "/" +
                                              std::to_string(with_triggers) + " runs with triggers");
  o.require(passes >= 40, "final error <= median ray distance in " + std::to_string(passes) +
                              "/50 runs (need 40; " + std::to_string(fused_runs) + " runs reached a fused estimate, " +
                              fmt(trigger_total / 50) + " triggers per run)");
  o.require(slowest < 120, "slowest run " + fmt(slowest) + " s < 120");
  std::printf("  info: fused error non-increasing after the 3rd trigger in %d/%d eligible runs\n", monotone,
              monotone_eligible);
  return o;
}

// ---------------------------------------------------------------------------

std::string file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

Outcome infrastructure(const Checkpoint& trained) {
  Outcome o;

  // Ring buffer against a flat copy of everything ever pushed.
  Rng rng(707);
  bool ring_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const double fs = 1000.0, cap = uniform(rng, 0.5, 3.0);
    const auto cap_n = static_cast<std::size_t>(std::llround(cap * fs));
    RingBuffer buf(2, fs, cap);
    std::vector<std::vector<double>> flat(2);
    for (int p = 0; p < 20; ++p) {
      MultiChannelClip c;
      const std::size_t n = 1 + uniform_index(rng, 2 * cap_n);
      for (int m = 0; m < 2; ++m) {
        Waveform w{{}, fs};
        for (std::size_t i = 0; i < n; ++i) w.samples.push_back(gaussian(rng));
        flat[static_cast<std::size_t>(m)].insert(flat[static_cast<std::size_t>(m)].end(), w.samples.begin(), w.samples.end());
        c.channels.push_back(std::move(w));
      }
      buf.push(c);
      const std::size_t total = flat[0].size(), oldest = total > cap_n ? total - cap_n : 0;
      const std::size_t len = 1 + uniform_index(rng, total - oldest);
      const std::size_t start = oldest + uniform_index(rng, total - oldest - len + 1);
      const double retro = 0.25 * static_cast<double>(len) / fs;
      const MultiChannelClip got = buf.extract(static_cast<double>(start) / fs + retro, retro, static_cast<double>(len) / fs - retro);
      for (int m = 0; m < 2; ++m) {
        const auto& src = flat[static_cast<std::size_t>(m)];
        ring_ok &= got.length() == len &&
                   std::memcmp(got.channels[static_cast<std::size_t>(m)].samples.data(), src.data() + start,
                               len * sizeof(double)) == 0;
      }
    }
  }
  o.require(ring_ok, "ring buffer wraparound bitwise");

  // Checkpoint: tensors bitwise, and re-saving reproduces the file.
  const fs::path dir = fs::temp_directory_path() / "skyear_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_checkpoint(dir / "a.ckpt", trained);
  const Checkpoint back = load_checkpoint(dir / "a.ckpt");
  save_checkpoint(dir / "b.ckpt", back);
  bool ckpt_ok = back.threshold == trained.threshold && file_bytes(dir / "a.ckpt") == file_bytes(dir / "b.ckpt");
  std::vector<const Eigen::MatrixXd*> a, b;
  trained.params.visit([&](const std::string&, const Eigen::MatrixXd& t) { a.push_back(&t); });
  back.params.visit([&](const std::string&, const Eigen::MatrixXd& t) { b.push_back(&t); });
  ckpt_ok &= a.size() == b.size();
  for (std::size_t i = 0; ckpt_ok && i < a.size(); ++i) {
    ckpt_ok &= a[i]->size() == b[i]->size() &&
               std::memcmp(a[i]->data(), b[i]->data(), sizeof(double) * static_cast<std::size_t>(a[i]->size())) == 0;
  }
  o.require(ckpt_ok, "checkpoint round trip bitwise");

  // Dataset manifest, echoed config and mission log are checksum-stable across reruns.
  const std::string cfg_text = R"({"gen": {"noise_clips": 5, "victim_clips": 2}})";
  csv::write_text(dir / "cfg.json", cfg_text);
  std::vector<std::string> sums;
  for (const char* run : {"r1", "r2"}) {
    const RunConfig cfg = resolve_config(dir / "cfg.json", 77, std::string("forest"), dir / run);
    const std::string manifest = csv::checksum(csv::read_text(cmd_gen(cfg)));
    sums.push_back(manifest + csv::checksum(csv::read_text(dir / run / "config.json")));
  }
  const Sentinel model(trained.params, trained.mel);
  const MissionConfig mcfg = default_mission_config(Scenario::Desert, 5);
  const std::string m1 = csv::checksum(run_mission(mcfg, model, trained.threshold).to_csv());
  const std::string m2 = csv::checksum(run_mission(mcfg, model, trained.threshold).to_csv());
  o.require(sums[0] == sums[1] && m1 == m2, "manifest, config and mission CSV checksums stable (" + m1 + ")");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  try {
    report(1, "DoA matches grid minimizer", doa_oracle_equivalence());
    report(2, "GCC-PHAT delay accuracy", gcc_phat_accuracy());
    report(3, "fusion matches grid minimizer", fusion_oracle_equivalence());
    report(4, "MAE gradients, shapes, equivariance", mae_correctness());

    const TrainedModel desert = train_scenario(Scenario::Desert, 11);
    const TrainedModel forest = train_scenario(Scenario::Forest, 12);
    report(5, "detection capability and altitude trend", detection_capability(desert, forest));
    report(6, "end-to-end mission", mission_end_to_end(desert.checkpoint));
    report(7, "infrastructure exactness", infrastructure(desert.checkpoint));
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("acceptance: %d criterion(s) failed, %.0f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
