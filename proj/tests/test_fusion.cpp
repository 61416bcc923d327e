#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "skyear/error.hpp"
#include "skyear/fusion.hpp"
#include "skyear/rng.hpp"
#include "skyear/scene.hpp"

using namespace skyear;

namespace {

Vec3 random_unit(Rng& rng) {
  Vec3 v(gaussian(rng), gaussian(rng), gaussian(rng));
  return v.normalized();
}

// Rays from random UAV positions toward `target`, each bent by `noise` radians (roughly).
std::vector<Observation> rays_to(const Vec3& target, int k, double noise, Rng& rng) {
  std::vector<Observation> obs;
  for (int i = 0; i < k; ++i) {
    const Vec3 p(uniform(rng, -60, 60), uniform(rng, -60, 60), uniform(rng, 5, 30));
    Vec3 u = (target - p).normalized();
    u = (u + noise * random_unit(rng)).normalized();
    obs.push_back(Observation{p, u, uniform(rng, 0.2, 1.0), static_cast<double>(i)});
  }
  return obs;
}

Waveform white(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(gaussian(rng));
  return w;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::FormatError;
}

}  // namespace

TEST_CASE("projector algebra") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 u = random_unit(rng);
    const Eigen::Matrix3d p = projector(u);
    CHECK((p - p.transpose()).norm() == 0.0);
    CHECK((p * p - p).norm() <= 1e-12);
    CHECK((p * u).norm() <= 1e-12);
  }
}

TEST_CASE("two rays meeting at the origin") {
  const std::vector<Observation> obs{{Vec3(-10, 0, 5), Vec3(10, 0, -5).normalized(), 1.0, 0.0},
                                     {Vec3(10, 0, 5), Vec3(-10, 0, -5).normalized(), 1.0, 1.0}};
  const FusedEstimate e = fuse(obs);
  CHECK(e.position.norm() <= 1e-9);
  CHECK(e.used == 2);
  CHECK_FALSE(e.above_uav);
  CHECK(e.condition >= 1.0);
}

TEST_CASE("degenerate inputs") {
  const Vec3 u = Vec3(1, 2, -3).normalized();
  const std::vector<Observation> parallel{{Vec3(0, 0, 5), u, 1.0, 0}, {Vec3(4, 1, 5), u, 1.0, 1}, {Vec3(-3, 7, 5), u, 0.5, 2}};
  CHECK(code_of([&] { fuse(parallel); }) == ErrorCode::DegenerateGeometry);
  const std::vector<Observation> one{{Vec3(0, 0, 5), u, 1.0, 0}};
  CHECK(code_of([&] { fuse(one); }) == ErrorCode::TooFewObservations);
  CHECK(code_of([&] { fuse(std::vector<Observation>{}); }) == ErrorCode::TooFewObservations);
  std::vector<Observation> zero{{Vec3(-10, 0, 5), Vec3(1, 0, -1).normalized(), 0.0, 0},
                                {Vec3(10, 0, 5), Vec3(-1, 0, -1).normalized(), 0.0, 1}};
  CHECK(code_of([&] { fuse(zero); }) == ErrorCode::DegenerateGeometry);
}

TEST_CASE("rays through one point recover it") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Vec3 s(uniform(rng, -20, 20), uniform(rng, -20, 20), uniform(rng, -2, 0));
    const std::vector<Observation> obs = rays_to(s, 2 + static_cast<int>(uniform_index(rng, 7)), 0.0, rng);
    CHECK((fuse(obs).position - s).norm() <= 1e-9);
  }
}

TEST_CASE("matches an exhaustive search of the objective") {
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    const Vec3 s(uniform(rng, -20, 20), uniform(rng, -20, 20), 0.0);
    const std::vector<Observation> obs = rays_to(s, 5, 0.05, rng);
    const FusedEstimate e = fuse(obs);
    const Vec3 ref = oracle::fusion_grid_search(obs, s, 40.0);
    CHECK((e.position - ref).norm() <= 1e-3);
    CHECK(fusion_objective(obs, e.position) <= oracle::fusion_objective(obs, ref) + 1e-12);
    CHECK(fusion_objective(obs, ref) == doctest::Approx(oracle::fusion_objective(obs, ref)).epsilon(1e-12));
  }
}

TEST_CASE("uniform weight scaling changes nothing") {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    std::vector<Observation> obs = rays_to(Vec3(1, 2, 0), 6, 0.1, rng);
    const Vec3 base = fuse(obs).position;
    for (double c : {1e-3, 3.0, 1e4}) {
      std::vector<Observation> scaled = obs;
      for (auto& o : scaled) o.weight *= c;
      CHECK((fuse(scaled).position - base).norm() <= 1e-9);
    }
  }
}

TEST_CASE("more rays do not make the median error worse") {
  Rng rng(5);
  const int scenes = 400;
  std::vector<std::vector<double>> err(9);
  for (int s = 0; s < scenes; ++s) {
    const Vec3 target(uniform(rng, -10, 10), uniform(rng, -10, 10), 0.0);
    const std::vector<Observation> all = rays_to(target, 8, 0.05, rng);
    for (int k = 2; k <= 8; ++k) {
      try {
        err[static_cast<std::size_t>(k)].push_back(
            (fuse(std::span<const Observation>(all.data(), static_cast<std::size_t>(k))).position - target).norm());
      } catch (const Error&) {
        err[static_cast<std::size_t>(k)].push_back(1e9);
      }
    }
  }
  double prev = 1e300;
  for (int k = 2; k <= 8; ++k) {
    auto& e = err[static_cast<std::size_t>(k)];
    std::nth_element(e.begin(), e.begin() + scenes / 2, e.end());
    CHECK(e[scenes / 2] <= prev);
    prev = e[scenes / 2];
  }
}

TEST_CASE("estimates above the UAV are flagged") {
  // Rays that meet above the array.
  const std::vector<Observation> obs{{Vec3(-10, 0, 5), Vec3(10, 0, 5).normalized(), 1.0, 0},
                                     {Vec3(10, 0, 5), Vec3(-10, 0, 5).normalized(), 1.0, 1}};
  const FusedEstimate e = fuse(obs);
  CHECK(e.position.z() == doctest::Approx(10.0));
  CHECK(e.above_uav);
}

TEST_CASE("observation weights") {
  MultiChannelClip same;
  const Waveform w = white(16384, 1);
  for (int m = 0; m < 7; ++m) same.channels.push_back(w);
  CHECK(observation_weight(same, 0.0011) == doctest::Approx(1.0).epsilon(1e-6));

  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MultiChannelClip c;
    for (int m = 0; m < 7; ++m) c.channels.push_back(white(16384, seed * 16 + static_cast<std::uint64_t>(m)));
    worst = std::max(worst, observation_weight(c, 0.0011));
  }
  CHECK(worst < 0.3);

  // A coherent scene loses weight when 0 dB white noise is added.
  const MicArray a = build_circular_array(7, 0.25);
  const ScenarioProfile p = scenario_profile(Scenario::Desert);
  std::vector<double> drops;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Waveform s = gen_signal(SignalKind::VictimCry, 1.1, seed);
    MultiChannelClip clean = propagate(Vec3(8, -3, 0), pose_at(a, Vec3(0, 0, 6)), s, p);
    clean = clean.slice(1000, 16384);
    MultiChannelClip noisy = clean;
    Rng rng(seed + 99);
    for (auto& ch : noisy.channels) {
      const double level = rms(ch);
      for (double& v : ch.samples) v += level * gaussian(rng);
    }
    drops.push_back(observation_weight(clean, default_max_lag(a)) - observation_weight(noisy, default_max_lag(a)));
  }
  std::nth_element(drops.begin(), drops.begin() + 10, drops.end());
  CHECK(drops[10] > 0.0);
}
