#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "skyear/scene.hpp"

namespace skyear {

struct MelConfig {
  double fs = kSampleRate;
  int fft_size = 512;
  int hop = 128;
  int mel_bins = 64;
  double fmin = 50.0;
  double fmax = 8000.0;
  double log_floor = 1e-10;
  int clip_samples = 16384;  // 1.024 s at 16 kHz

  int frames() const { return clip_samples / hop; }
  double clip_duration() const { return clip_samples / fs; }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// F x T log-power image.
struct MelImage {
  Eigen::MatrixXd values;

  int bins() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
};

class RealFft;

// Reusable STFT + triangular Mel filterbank. Frames are centered on multiples
// of the hop with odd-extension padding (2 x[0] - x[i]) and the last partial frame dropped, so a
// clip of n samples gives n / hop frames.
class MelSpectrogram {
 public:
  explicit MelSpectrogram(const MelConfig& cfg);
  ~MelSpectrogram();
  MelSpectrogram(MelSpectrogram&&) noexcept;
  MelSpectrogram& operator=(MelSpectrogram&&) noexcept;

  const MelConfig& config() const { return cfg_; }
  // mel_bins x (fft_size / 2 + 1); area-normalized triangles.
  const Eigen::MatrixXd& filterbank() const { return filters_; }

  MelImage operator()(std::span<const double> clip) const;

 private:
  MelConfig cfg_;
  Eigen::MatrixXd filters_;
  std::vector<double> window_;
  std::unique_ptr<RealFft> fft_;
};

MelImage mel_spectrogram(const Waveform& clip, const MelConfig& cfg);

// Subtract the image mean and divide by its standard deviation.
MelImage standardize(const MelImage& img);

// N = (F/P)(T/P) patches, row n = flattened P x P tile (row-major cells).
// Patch order is frequency-major: n = (f / P) * (T / P) + t / P.
struct PatchGrid {
  Eigen::MatrixXd patches;
  int grid_rows = 0;
  int grid_cols = 0;
  int patch = 0;

  int count() const { return static_cast<int>(patches.rows()); }
};

PatchGrid patchify(const MelImage& img, int patch);
MelImage unpatchify(const PatchGrid& grid);

struct MaskPartition {
  std::vector<int> visible;  // sorted
  std::vector<int> masked;   // sorted
  double ratio = 0.0;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(visible.size() + masked.size()); }
};

int masked_count(int n, double ratio);
MaskPartition sample_mask(int n, double ratio, std::uint64_t seed);

// (x - mean) / population std; all zeros when std < 1e-8.
Eigen::RowVectorXd normalize_patch_row(const Eigen::Ref<const Eigen::RowVectorXd>& patch);
Eigen::MatrixXd normalize_patch(const Eigen::MatrixXd& patch);

}  // namespace skyear
