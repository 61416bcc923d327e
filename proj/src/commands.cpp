#include "skyear/commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "skyear/csv.hpp"
#include "skyear/error.hpp"
#include "skyear/mae.hpp"
#include "skyear/mission.hpp"
#include "skyear/rng.hpp"
#include "skyear/wav.hpp"

namespace skyear {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kVictimSeedBase = 1000000;
constexpr std::uint64_t kInitTag = 0x696e6974;
constexpr std::uint64_t kCalibrationTag = 0x63616c;
constexpr std::uint64_t kEvalTag = 0x6576616c;

// 17 ratios spanning 0.00 to 0.90: steps of 0.05 up to 0.70, then 0.80 and 0.90.
json rho_sweep() {
  json r = json::array();
  for (int i = 0; i <= 14; ++i) r.push_back(i / 20.0);
  r.push_back(0.80);
  r.push_back(0.90);
  return r;
}

void overlay(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw Error(ErrorCode::ConfigError, "unknown config key " + key);
    json& slot = base[it.key()];
    if (slot.is_object()) {
      overlay(slot, it.value(), key);
    } else if (!slot.is_null() && slot.type() != it.value().type() &&
               !(slot.is_number() && it.value().is_number())) {
      throw Error(ErrorCode::ConfigError, "config key " + key + " has the wrong type");
    } else {
      slot = it.value();
    }
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config key ") + key + ": " + e.what());
  }
}

MelConfig mel_from(const json& t) {
  const json& j = t.at("mel");
  MelConfig m;
  m.fs = get<double>(j, "fs");
  m.fft_size = get<int>(j, "fft_size");
  m.hop = get<int>(j, "hop");
  m.mel_bins = get<int>(j, "mel_bins");
  m.fmin = get<double>(j, "fmin");
  m.fmax = get<double>(j, "fmax");
  m.log_floor = get<double>(j, "log_floor");
  m.clip_samples = get<int>(j, "clip_samples");
  return m;
}

MaeConfig mae_from(const json& t) {
  const json& j = t.at("mae");
  MaeConfig c;
  c.patch = get<int>(j, "patch");
  c.grid_rows = get<int>(j, "grid_rows");
  c.grid_cols = get<int>(j, "grid_cols");
  c.embed_dim = get<int>(j, "embed_dim");
  c.enc_depth = get<int>(j, "enc_depth");
  c.enc_heads = get<int>(j, "enc_heads");
  c.dec_dim = get<int>(j, "dec_dim");
  c.dec_depth = get<int>(j, "dec_depth");
  c.dec_heads = get<int>(j, "dec_heads");
  c.mlp_ratio = get<int>(j, "mlp_ratio");
  c.top_k = get<double>(j, "top_k");
  return c;
}

GeneratorConfig generator_from(const json& t, double fs) {
  const json& j = t.at("generator");
  GeneratorConfig g;
  g.fs = fs;
  g.rotor_fundamental_hz = get<double>(j, "rotor_fundamental_hz");
  g.rotor_harmonics = get<int>(j, "rotor_harmonics");
  g.rotor_broadband_db = get<double>(j, "rotor_broadband_db");
  g.bird_rate_hz = get<double>(j, "bird_rate_hz");
  g.cry_f0_lo = get<double>(j, "cry_f0_lo");
  g.cry_f0_hi = get<double>(j, "cry_f0_hi");
  g.shout_f0_lo = get<double>(j, "shout_f0_lo");
  g.shout_f0_hi = get<double>(j, "shout_f0_hi");
  return g;
}

std::vector<double> doubles(const json& j, const char* key) {
  std::vector<double> v = get<std::vector<double>>(j, key);
  return v;
}

fs::path or_default(const json& j, const char* key, const fs::path& fallback) {
  const std::string s = get<std::string>(j, key);
  return s.empty() ? fallback : fs::path(s);
}

std::string fixed2(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.out.string() + ": " + ec.message());
  csv::write_text(cfg.out / "config.json", cfg.tree.dump(2) + "\n");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(',', pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error(ErrorCode::FormatError, "bad number '" + s + "'");
  return v;
}

std::vector<double> altitudes_for(const json& j, Scenario s) {
  std::vector<double> h = doubles(j, "altitudes");
  if (h.empty()) h = s == Scenario::Desert ? std::vector<double>{5, 10, 15, 20} : std::vector<double>{15, 20, 35, 50};
  return h;
}

}  // namespace

json default_config() {
  const MelConfig mel;
  const MaeConfig mae;
  const GeneratorConfig gen;
  const MissionConfig mission;
  return json{
      {"seed", 1},
      {"scenario", "desert"},
      {"mel",
       {{"fs", mel.fs},
        {"fft_size", mel.fft_size},
        {"hop", mel.hop},
        {"mel_bins", mel.mel_bins},
        {"fmin", mel.fmin},
        {"fmax", mel.fmax},
        {"log_floor", mel.log_floor},
        {"clip_samples", mel.clip_samples}}},
      {"mae",
       {{"patch", mae.patch},
        {"grid_rows", mae.grid_rows},
        {"grid_cols", mae.grid_cols},
        {"embed_dim", mae.embed_dim},
        {"enc_depth", mae.enc_depth},
        {"enc_heads", mae.enc_heads},
        {"dec_dim", mae.dec_dim},
        {"dec_depth", mae.dec_depth},
        {"dec_heads", mae.dec_heads},
        {"mlp_ratio", mae.mlp_ratio},
        {"top_k", mae.top_k}}},
      {"generator",
       {{"rotor_fundamental_hz", gen.rotor_fundamental_hz},
        {"rotor_harmonics", gen.rotor_harmonics},
        {"rotor_broadband_db", gen.rotor_broadband_db},
        {"bird_rate_hz", gen.bird_rate_hz},
        {"cry_f0_lo", gen.cry_f0_lo},
        {"cry_f0_hi", gen.cry_f0_hi},
        {"shout_f0_lo", gen.shout_f0_lo},
        {"shout_f0_hi", gen.shout_f0_hi}}},
      {"gen", {{"noise_clips", 200}, {"victim_clips", 50}}},
      {"pretrain",
       {{"dataset", ""},
        {"rho", rho_sweep()},
        {"learning_rate", 1e-3},
        {"epochs", 30},
        {"batch", 8},
        {"loss_patches", "all"},
        {"calibration_clips", 200}}},
      {"eval_detect", {{"checkpoints", ""}, {"rho", rho_sweep()}, {"altitudes", json::array()}, {"n_trials", 100}}},
      {"mission",
       {{"checkpoint", ""},
        {"rho", 0.10},
        {"altitude", nullptr},
        {"hover_spacing", mission.hover_spacing},
        {"cruise_speed", mission.cruise_speed},
        {"victim", {0.0, 0.0, 0.0}},
        {"victim_enabled", true},
        {"burst_period", mission.burst_period},
        {"burst_length", mission.burst_length},
        {"mics", mission.mics},
        {"radius", mission.radius},
        {"retro", mission.retro},
        {"post", mission.post},
        {"buffer_s", mission.buffer_s},
        {"speed_of_sound", mission.speed_of_sound},
        {"residual_bound", mission.residual_bound}}},
  };
}

RunConfig resolve_config(const std::optional<fs::path>& file, std::optional<std::uint64_t> seed,
                         std::optional<std::string> scenario, const fs::path& out) {
  RunConfig cfg;
  cfg.tree = default_config();
  cfg.out = out;
  if (file) {
    std::ifstream f(*file);
    if (!f) throw Error(ErrorCode::IoError, "cannot open config " + file->string());
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, "config " + file->string() + ": " + e.what());
    }
    overlay(cfg.tree, j, "");
  }
  if (seed) cfg.tree["seed"] = *seed;
  if (scenario) cfg.tree["scenario"] = *scenario;
  parse_scenario(cfg.scenario());  // validates
  return cfg;
}

std::string checkpoint_name(const std::string& scenario, double rho) {
  return "mae_" + scenario + "_rho" + fixed2(rho) + ".ckpt";
}

fs::path cmd_gen(const RunConfig& cfg) {
  const Scenario sc = parse_scenario(cfg.scenario());
  prepare_out(cfg);
  const ScenarioProfile profile = scenario_profile(sc);
  const MelConfig mel = mel_from(cfg.tree);
  const GeneratorConfig gen = generator_from(cfg.tree, mel.fs);
  const json& j = cfg.tree.at("gen");
  const int n_noise = get<int>(j, "noise_clips"), n_victim = get<int>(j, "victim_clips");
  if (n_noise < 0 || n_victim < 0) throw Error(ErrorCode::ConfigError, "clip counts must be non-negative");

  fs::create_directories(cfg.out / "noise");
  fs::create_directories(cfg.out / "victim");
  csv::Table manifest({"file", "kind", "scenario", "seed", "level_db", "samples", "full_scale_pa", "checksum"});
  auto emit = [&](const std::string& rel, const std::string& kind, std::uint64_t seed, const Waveform& w) {
    const MultiChannelClip clip = mono_clip(w);
    const double full_scale = peak_full_scale(clip);
    write_wav(cfg.out / rel, clip, full_scale);
    manifest.add({rel, kind, std::string(profile.name()), std::to_string(seed), csv::number(level_for_pascals(rms(w))),
                  csv::integer(static_cast<long long>(w.size())), csv::number(full_scale),
                  csv::checksum(csv::read_text(cfg.out / rel))});
  };
  char name[64];
  for (int i = 0; i < n_noise; ++i) {
    const std::uint64_t seed = derive_seed(cfg.seed(), static_cast<std::uint64_t>(i));
    Waveform w = gen_background(profile, mel.clip_duration(), seed, gen);
    w.samples.resize(static_cast<std::size_t>(mel.clip_samples), 0.0);
    std::snprintf(name, sizeof(name), "noise/noise_%04d.wav", i);
    emit(name, "noise", seed, w);
  }
  for (int i = 0; i < n_victim; ++i) {
    const std::uint64_t seed = derive_seed(cfg.seed(), kVictimSeedBase + static_cast<std::uint64_t>(i));
    std::snprintf(name, sizeof(name), "victim/victim_%04d.wav", i);
    emit(name, "victim", seed, make_victim_audio(seed, profile.victim_level_db, gen));
  }
  const fs::path path = cfg.out / "manifest.csv";
  manifest.write(path);
  return path;
}

fs::path cmd_pretrain(const RunConfig& cfg) {
  const Scenario sc = parse_scenario(cfg.scenario());
  const json& j = cfg.tree.at("pretrain");
  const fs::path dataset = or_default(j, "dataset", cfg.out);
  const fs::path manifest_path = dataset / "manifest.csv";
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::IoError, "no dataset manifest at " + manifest_path.string());
  prepare_out(cfg);
  const MelConfig mel = mel_from(cfg.tree);
  const GeneratorConfig gen = generator_from(cfg.tree, mel.fs);
  const ScenarioProfile profile = scenario_profile(sc);

  // Noise clips only; victim audio is reserved for evaluation.
  std::vector<Waveform> clips;
  const std::string text = csv::read_text(manifest_path);
  std::size_t pos = text.find('\n') + 1;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::vector<std::string> f = split(text.substr(pos, end - pos));
    pos = end == std::string::npos ? text.size() : end + 1;
    if (f.size() != 8) throw Error(ErrorCode::FormatError, "manifest row with " + std::to_string(f.size()) + " fields");
    if (f[1] != "noise") continue;
    WavData wav = read_wav(dataset / f[0], parse_double(f[6]));
    Waveform w = std::move(wav.clip.channels.at(0));
    if (static_cast<int>(w.size()) != mel.clip_samples) throw Error(ErrorCode::LengthMismatch, f[0] + " has the wrong length");
    clips.push_back(std::move(w));
  }
  MaeConfig mae = mae_from(cfg.tree);
  const std::vector<PatchGrid> grids = prepare_training_set(clips, mel, mae.patch);

  TrainHyper hyper;
  hyper.learning_rate = get<double>(j, "learning_rate");
  hyper.epochs = get<int>(j, "epochs");
  hyper.batch = get<int>(j, "batch");
  hyper.seed = cfg.seed();
  const std::string which = get<std::string>(j, "loss_patches");
  if (which == "all") hyper.loss_patches = LossPatches::All;
  else if (which == "masked") hyper.loss_patches = LossPatches::Masked;
  else throw Error(ErrorCode::ConfigError, "loss_patches must be 'all' or 'masked'");
  const int n_cal = get<int>(j, "calibration_clips");

  csv::Table summary({"scenario", "rho", "checkpoint", "threshold", "initial_loss", "final_loss", "optimizer"});
  for (double rho : doubles(j, "rho")) {
    mae.mask_ratio = rho;
    mae.validate();
    TrainResult trained = pretrain(init_params(mae, derive_seed(cfg.seed(), kInitTag)), grids, hyper);
    Checkpoint ckpt{std::move(trained.params), mel, 0.0};
    const Sentinel model(ckpt.params, mel);
    ckpt.threshold = calibrate_threshold(sentinel_scorer(model), profile, n_cal, derive_seed(cfg.seed(), kCalibrationTag),
                                         mel.clip_samples, gen);
    const std::string name = checkpoint_name(cfg.scenario(), rho);
    save_checkpoint(cfg.out / name, ckpt);

    csv::Table loss({"epoch", "loss"});
    for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e) {
      loss.add({csv::integer(static_cast<long long>(e + 1)), csv::number(trained.epoch_loss[e])});
    }
    loss.write(cfg.out / ("loss_" + cfg.scenario() + "_rho" + fixed2(rho) + ".csv"));
    summary.add({cfg.scenario(), csv::number(rho), name, csv::number(ckpt.threshold),
                 csv::number(trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.front()),
                 csv::number(trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.back()), trained.optimizer});
  }
  const fs::path path = cfg.out / ("pretrain_" + cfg.scenario() + ".csv");
  summary.write(path);
  return path;
}

fs::path cmd_eval_detect(const RunConfig& cfg) {
  const Scenario sc = parse_scenario(cfg.scenario());
  const json& j = cfg.tree.at("eval_detect");
  const fs::path dir = or_default(j, "checkpoints", cfg.out);
  const MelConfig mel = mel_from(cfg.tree);
  const GeneratorConfig gen = generator_from(cfg.tree, mel.fs);
  const int n_trials = get<int>(j, "n_trials");
  const std::vector<double> rhos = doubles(j, "rho");
  for (double rho : rhos) {
    if (!fs::exists(dir / checkpoint_name(cfg.scenario(), rho))) {
      throw Error(ErrorCode::IoError, "missing checkpoint " + (dir / checkpoint_name(cfg.scenario(), rho)).string());
    }
  }
  prepare_out(cfg);

  csv::Table table({"scenario", "h_m", "rho", "accuracy", "n_trials", "seed"});
  csv::Table detail({"scenario", "h_m", "rho", "accuracy", "hit_rate", "false_alarm_rate", "threshold", "n_trials", "seed"});
  for (double rho : rhos) {
    const Checkpoint ckpt = load_checkpoint(dir / checkpoint_name(cfg.scenario(), rho));
    const Sentinel model(ckpt.params, ckpt.mel);
    for (double h : altitudes_for(j, sc)) {
      DetectionSetup setup;
      setup.profile = scenario_profile(sc);
      setup.altitude = h;
      setup.n_trials = n_trials;
      setup.threshold = ckpt.threshold;
      setup.seed = derive_seed(cfg.seed(), kEvalTag);
      setup.clip_samples = ckpt.mel.clip_samples;
      setup.generator = gen;
      const DetectionResult r = eval_detection(sentinel_scorer(model), setup);
      table.add({cfg.scenario(), csv::number(h), csv::number(rho), csv::number(r.accuracy), csv::integer(n_trials),
                 std::to_string(cfg.seed())});
      detail.add({cfg.scenario(), csv::number(h), csv::number(rho), csv::number(r.accuracy), csv::number(r.hit_rate),
                  csv::number(r.false_alarm_rate), csv::number(ckpt.threshold), csv::integer(n_trials),
                  std::to_string(cfg.seed())});
    }
  }
  detail.write(cfg.out / ("detect_detail_" + cfg.scenario() + ".csv"));
  const fs::path path = cfg.out / ("detect_" + cfg.scenario() + ".csv");
  table.write(path);
  return path;
}

fs::path cmd_mission(const RunConfig& cfg) {
  const Scenario sc = parse_scenario(cfg.scenario());
  const json& j = cfg.tree.at("mission");
  const double rho = get<double>(j, "rho");
  const fs::path ckpt_path = or_default(j, "checkpoint", cfg.out / checkpoint_name(cfg.scenario(), rho));
  if (!fs::exists(ckpt_path)) throw Error(ErrorCode::IoError, "missing checkpoint " + ckpt_path.string());
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  prepare_out(cfg);

  MissionConfig m = default_mission_config(sc, cfg.seed());
  if (!j.at("altitude").is_null()) m.altitude = get<double>(j, "altitude");
  m.hover_spacing = get<double>(j, "hover_spacing");
  m.waypoints = build_search_trajectory(m.altitude, m.hover_spacing);
  m.cruise_speed = get<double>(j, "cruise_speed");
  const std::vector<double> victim = doubles(j, "victim");
  if (victim.size() != 3) throw Error(ErrorCode::ConfigError, "mission.victim needs 3 coordinates");
  m.victim = Vec3(victim[0], victim[1], victim[2]);
  m.victim_enabled = get<bool>(j, "victim_enabled");
  m.burst_period = get<double>(j, "burst_period");
  m.burst_length = get<double>(j, "burst_length");
  m.mics = get<int>(j, "mics");
  m.radius = get<double>(j, "radius");
  m.retro = get<double>(j, "retro");
  m.post = get<double>(j, "post");
  m.buffer_s = get<double>(j, "buffer_s");
  m.speed_of_sound = get<double>(j, "speed_of_sound");
  m.residual_bound = get<double>(j, "residual_bound");
  m.clip_samples = ckpt.mel.clip_samples;
  m.generator = generator_from(cfg.tree, ckpt.mel.fs);

  const Sentinel model(ckpt.params, ckpt.mel);
  const MissionLog log = run_mission(m, model, ckpt.threshold);
  const fs::path path = cfg.out / ("mission_" + cfg.scenario() + ".csv");
  csv::write_text(path, log.to_csv());

  json summary{{"hovers", log.hovers.size()},
               {"triggers", log.triggers()},
               {"threshold", ckpt.threshold},
               {"checkpoint", ckpt_path.filename().string()},
               {"sentinel_scores", log.counters.sentinel_scores},
               {"gcc_calls", log.counters.gcc_calls},
               {"extractions", log.counters.extractions},
               {"degenerate_fusions", log.counters.degenerate_fusions},
               {"final_error_m", log.final_error ? json(*log.final_error) : json(nullptr)}};
  csv::write_text(cfg.out / ("mission_" + cfg.scenario() + "_summary.json"), summary.dump(2) + "\n");
  return path;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Sky-Ear synthetic search-and-rescue acoustics pipeline"};
  app.require_subcommand(1);
  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scenario;
  std::string out = "out";
  app.add_option("--config", config_file, "JSON config file overlaying the defaults");
  app.add_option("--seed", seed, "Global seed");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--scenario", scenario, "desert or forest");

  std::map<std::string, fs::path (*)(const RunConfig&)> commands{
      {"gen", cmd_gen}, {"pretrain", cmd_pretrain}, {"eval-detect", cmd_eval_detect}, {"mission", cmd_mission}};
  const std::map<std::string, std::string> help{
      {"gen", "Write synthetic noise and victim clips plus a manifest"},
      {"pretrain", "Train one MAE per masking ratio and calibrate its threshold"},
      {"eval-detect", "Detection accuracy per altitude and masking ratio"},
      {"mission", "Run the two-stage search mission along the trajectory"}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    const RunConfig cfg = resolve_config(config_file ? std::optional<fs::path>(*config_file) : std::nullopt, seed,
                                         scenario, out);
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) std::cout << fn(cfg).string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace skyear
