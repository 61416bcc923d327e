#include "skyear/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "skyear/error.hpp"
#include "skyear/fft.hpp"
#include "skyear/rng.hpp"

namespace skyear {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelSpectrogram::MelSpectrogram(const MelConfig& cfg)
    : cfg_(cfg), filters_(cfg.mel_bins, cfg.fft_size / 2 + 1), window_(static_cast<std::size_t>(cfg.fft_size)),
      fft_(std::make_unique<RealFft>(cfg.fft_size)) {
  for (int i = 0; i < cfg.fft_size; ++i) {
    window_[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg.fft_size);
  }
  const double mel_lo = hz_to_mel(cfg.fmin), mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> edges(static_cast<std::size_t>(cfg.mel_bins + 2));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (cfg.mel_bins + 1));
  }
  filters_.setZero();
  for (int b = 0; b < cfg.mel_bins; ++b) {
    const double lo = edges[static_cast<std::size_t>(b)], mid = edges[static_cast<std::size_t>(b + 1)],
                 hi = edges[static_cast<std::size_t>(b + 2)];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < filters_.cols(); ++k) {
      const double f = k * cfg.fs / cfg.fft_size;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      filters_(b, k) = w * norm;
    }
  }
}

MelSpectrogram::~MelSpectrogram() = default;
MelSpectrogram::MelSpectrogram(MelSpectrogram&&) noexcept = default;
MelSpectrogram& MelSpectrogram::operator=(MelSpectrogram&&) noexcept = default;

MelImage MelSpectrogram::operator()(std::span<const double> clip) const {
  if (static_cast<int>(clip.size()) != cfg_.clip_samples) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(cfg_.clip_samples) + " samples, got " +
                                               std::to_string(clip.size()));
  }
  const int n = cfg_.clip_samples, half = cfg_.fft_size / 2, frames = cfg_.frames();
  const int bins = cfg_.fft_size / 2 + 1;
  // Odd extension about the end samples keeps value and slope continuous, so a
  // tone stays a tone in the edge frames.
  auto sample = [&](int i) {
    if (i < 0) return 2.0 * clip[0] - clip[static_cast<std::size_t>(std::min(-i, n - 1))];
    if (i >= n) return 2.0 * clip[static_cast<std::size_t>(n - 1)] - clip[static_cast<std::size_t>(std::max(2 * (n - 1) - i, 0))];
    return clip[static_cast<std::size_t>(i)];
  };
  std::vector<double> frame(static_cast<std::size_t>(cfg_.fft_size));
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(bins));
  Eigen::MatrixXd power(bins, frames);
  for (int t = 0; t < frames; ++t) {
    const int center = t * cfg_.hop;
    for (int i = 0; i < cfg_.fft_size; ++i) {
      frame[static_cast<std::size_t>(i)] = sample(center - half + i) * window_[static_cast<std::size_t>(i)];
    }
    fft_->forward(frame, spec);
    for (int k = 0; k < bins; ++k) power(k, t) = std::norm(spec[static_cast<std::size_t>(k)]);
  }
  MelImage img;
  img.values = (filters_ * power).array().unaryExpr([this](double x) { return std::log(x + cfg_.log_floor); });
  return img;
}

MelImage mel_spectrogram(const Waveform& clip, const MelConfig& cfg) { return MelSpectrogram(cfg)(clip.samples); }

MelImage standardize(const MelImage& img) {
  const double mean = img.values.mean();
  const double var = (img.values.array() - mean).square().mean();
  const double sd = std::sqrt(var);
  MelImage out;
  out.values = img.values.array() - mean;
  if (sd > 1e-8) out.values /= sd;
  return out;
}

PatchGrid patchify(const MelImage& img, int patch) {
  const int F = img.bins(), T = img.frames();
  if (patch <= 0 || F % patch != 0 || T % patch != 0) {
    throw Error(ErrorCode::IndivisibleDims, "patch size " + std::to_string(patch) + " does not divide " +
                                                std::to_string(F) + "x" + std::to_string(T));
  }
  PatchGrid grid;
  grid.patch = patch;
  grid.grid_rows = F / patch;
  grid.grid_cols = T / patch;
  grid.patches.resize(grid.grid_rows * grid.grid_cols, patch * patch);
  for (int r = 0; r < grid.grid_rows; ++r) {
    for (int c = 0; c < grid.grid_cols; ++c) {
      const int n = r * grid.grid_cols + c;
      for (int i = 0; i < patch; ++i) {
        for (int j = 0; j < patch; ++j) grid.patches(n, i * patch + j) = img.values(r * patch + i, c * patch + j);
      }
    }
  }
  return grid;
}

MelImage unpatchify(const PatchGrid& grid) {
  const int P = grid.patch;
  MelImage img;
  img.values.resize(grid.grid_rows * P, grid.grid_cols * P);
  for (int r = 0; r < grid.grid_rows; ++r) {
    for (int c = 0; c < grid.grid_cols; ++c) {
      const int n = r * grid.grid_cols + c;
      for (int i = 0; i < P; ++i) {
        for (int j = 0; j < P; ++j) img.values(r * P + i, c * P + j) = grid.patches(n, i * P + j);
      }
    }
  }
  return img;
}

int masked_count(int n, double ratio) { return static_cast<int>(std::round(n * ratio)); }

MaskPartition sample_mask(int n, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 0.95)) {
    throw Error(ErrorCode::RatioOutOfRange, "masking ratio " + std::to_string(ratio) + " outside [0, 0.95]");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x6d61736bULL));
  // Fisher-Yates with a portable index draw.
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
  const auto cut = static_cast<std::ptrdiff_t>(masked_count(n, ratio));
  MaskPartition mask;
  mask.ratio = ratio;
  mask.seed = seed;
  mask.masked.assign(order.begin(), order.begin() + cut);
  mask.visible.assign(order.begin() + cut, order.end());
  std::sort(mask.masked.begin(), mask.masked.end());
  std::sort(mask.visible.begin(), mask.visible.end());
  return mask;
}

Eigen::RowVectorXd normalize_patch_row(const Eigen::Ref<const Eigen::RowVectorXd>& patch) {
  const double mean = patch.mean();
  const double sd = std::sqrt((patch.array() - mean).square().mean());
  if (sd < 1e-8) return Eigen::RowVectorXd::Zero(patch.size());
  return (patch.array() - mean) / sd;
}

Eigen::MatrixXd normalize_patch(const Eigen::MatrixXd& patch) {
  const double mean = patch.mean();
  const double sd = std::sqrt((patch.array() - mean).square().mean());
  if (sd < 1e-8) return Eigen::MatrixXd::Zero(patch.rows(), patch.cols());
  return (patch.array() - mean) / sd;
}

}  // namespace skyear
