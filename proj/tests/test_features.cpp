#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "skyear/error.hpp"
#include "skyear/features.hpp"
#include "skyear/rng.hpp"

using namespace skyear;

namespace {

Waveform tone(double f, int n, double amp = 1.0) {
  Waveform w;
  for (int i = 0; i < n; ++i) w.samples.push_back(amp * std::sin(2 * std::numbers::pi * f * i / w.fs));
  return w;
}

// Center frequencies of an HTK mel filterbank, computed from scratch.
std::vector<double> mel_centers(int bins, double fmin, double fmax) {
  auto mel = [](double f) { return 1127.0 * std::log(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::exp(m / 1127.0) - 1.0); };
  std::vector<double> c;
  for (int b = 1; b <= bins; ++b) c.push_back(hz(mel(fmin) + (mel(fmax) - mel(fmin)) * b / (bins + 1)));
  return c;
}

MelImage random_image(Rng& rng, int F, int T) {
  MelImage img;
  img.values.resize(F, T);
  for (int i = 0; i < F; ++i)
    for (int j = 0; j < T; ++j) img.values(i, j) = uniform(rng, -5, 5);
  return img;
}

}  // namespace

TEST_CASE("mel scale round trip") {
  for (double f : {0.0, 50.0, 700.0, 1000.0, 8000.0}) CHECK(mel_to_hz(hz_to_mel(f)) == doctest::Approx(f).epsilon(1e-12));
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
}

TEST_CASE("silence sits on the floor") {
  const MelConfig cfg;
  const MelImage img = mel_spectrogram(Waveform{std::vector<double>(16384, 0.0)}, cfg);
  CHECK(img.bins() == 64);
  CHECK(img.frames() == 128);
  CHECK((img.values.array() == std::log(1e-10)).all());
}

TEST_CASE("clip length must match") {
  const MelConfig cfg;
  try {
    mel_spectrogram(Waveform{std::vector<double>(16000, 0.0)}, cfg);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("a 1 kHz tone peaks in the nearest mel bin") {
  const MelConfig cfg;
  const std::vector<double> centers = mel_centers(cfg.mel_bins, cfg.fmin, cfg.fmax);
  int nearest = 0;
  for (int b = 1; b < cfg.mel_bins; ++b) {
    if (std::abs(centers[static_cast<std::size_t>(b)] - 1000) < std::abs(centers[static_cast<std::size_t>(nearest)] - 1000)) nearest = b;
  }
  const MelImage img = mel_spectrogram(tone(1000.0, cfg.clip_samples), cfg);
  for (int t = 0; t < img.frames(); ++t) {
    Eigen::Index arg;
    img.values.col(t).maxCoeff(&arg);
    CHECK(arg == nearest);
  }
}

TEST_CASE("louder clips never lower any entry") {
  const MelConfig cfg;
  const MelSpectrogram mel(cfg);
  Rng rng(3);
  Waveform w;
  for (int i = 0; i < cfg.clip_samples; ++i) w.samples.push_back(gaussian(rng));
  const MelImage a = mel(w.samples);
  for (double c : {1.001, 2.0, 100.0}) {
    Waveform s = w;
    for (double& v : s.samples) v *= c;
    CHECK((mel(s.samples).values.array() >= a.values.array()).all());
  }
}

TEST_CASE("standardize gives zero mean and unit spread") {
  Rng rng(1);
  const MelImage s = standardize(random_image(rng, 16, 32));
  CHECK(std::abs(s.values.mean()) < 1e-12);
  CHECK(std::sqrt(s.values.array().square().mean()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("patch layout") {
  Rng rng(2);
  const MelImage img = random_image(rng, 64, 128);
  const PatchGrid g = patchify(img, 8);
  CHECK(g.count() == 128);
  CHECK(g.grid_rows == 8);
  CHECK(g.grid_cols == 16);
  // Patch n = (f / P) * (T / P) + t / P, cells row-major.
  for (int f = 0; f < 64; f += 5) {
    for (int t = 0; t < 128; t += 7) {
      CHECK(g.patches((f / 8) * 16 + t / 8, (f % 8) * 8 + t % 8) == img.values(f, t));
    }
  }
  try {
    patchify(img, 7);
    FAIL("expected IndivisibleDims");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndivisibleDims);
  }
}

TEST_CASE("unpatchify inverts patchify") {
  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const int P = 1 + static_cast<int>(uniform_index(rng, 4));
    const int F = P * (1 + static_cast<int>(uniform_index(rng, 4)));
    const int T = P * (1 + static_cast<int>(uniform_index(rng, 6)));
    const MelImage img = random_image(rng, F, T);
    CHECK(unpatchify(patchify(img, P)).values == img.values);
  }
}

TEST_CASE("mask sizes and determinism") {
  const MaskPartition none = sample_mask(128, 0.0, 1);
  CHECK(none.masked.empty());
  CHECK(none.visible.size() == 128);
  CHECK(sample_mask(128, 0.10, 1).masked.size() == 13);
  CHECK(masked_count(128, 0.10) == 13);
  CHECK(masked_count(10, 0.25) == 3);  // half rounds away from zero
  const MaskPartition a = sample_mask(128, 0.3, 99), b = sample_mask(128, 0.3, 99), c = sample_mask(128, 0.3, 100);
  CHECK(a.masked == b.masked);
  CHECK(a.visible == b.visible);
  CHECK(a.masked != c.masked);
  for (double bad : {-0.01, 0.96, 1.0}) {
    try {
      sample_mask(128, bad, 1);
      FAIL("expected RatioOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RatioOutOfRange);
    }
  }
}

TEST_CASE("masks are partitions") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 300));
    const double rho = uniform(rng, 0.0, 0.95);
    const MaskPartition m = sample_mask(n, rho, rng());
    std::set<int> all(m.visible.begin(), m.visible.end());
    for (int i : m.masked) CHECK(all.insert(i).second);
    CHECK(static_cast<int>(all.size()) == n);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == n - 1);
    CHECK(std::is_sorted(m.visible.begin(), m.visible.end()));
    CHECK(std::is_sorted(m.masked.begin(), m.masked.end()));
    CHECK(static_cast<int>(m.masked.size()) == static_cast<int>(std::round(n * rho)));
  }
}

TEST_CASE("patch normalization") {
  CHECK(normalize_patch(Eigen::MatrixXd::Constant(8, 8, 3.5)).isZero(0.0));
  Eigen::MatrixXd two(1, 2);
  two << 0, 2;
  const Eigen::MatrixXd n = normalize_patch(two);
  CHECK(n(0, 0) == doctest::Approx(-1.0));
  CHECK(n(0, 1) == doctest::Approx(1.0));

  Rng rng(6);
  Eigen::MatrixXd x(8, 8);
  for (int i = 0; i < 64; ++i) x(i) = gaussian(rng);
  const Eigen::MatrixXd once = normalize_patch(x);
  CHECK((normalize_patch(once) - once).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(x.data(), 64);
  const Eigen::RowVectorXd r = normalize_patch_row(row);
  CHECK((r - Eigen::Map<const Eigen::RowVectorXd>(once.data(), 64)).cwiseAbs().maxCoeff() < 1e-12);
}
