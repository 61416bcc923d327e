#pragma once

#include <vector>

#include "skyear/geometry.hpp"
#include "skyear/scene.hpp"

namespace skyear {

struct TdoaEstimate {
  double tdoa = 0.0;  // seconds; positive when x arrives later than ref
  double peak = 0.0;  // interpolated PHAT correlation peak
  int lag = 0;        // integer argmax in samples, before refinement
};

// GCC-PHAT restricted to |lag| <= max_lag seconds, with 3-point parabolic refinement.
TdoaEstimate gcc_phat(const Waveform& x, const Waveform& ref, double max_lag_s);

struct TdoaSet {
  std::vector<double> delays;  // mic m = 1..M-1 relative to mic 0, at index m - 1
  std::vector<double> peaks;
};

TdoaSet compute_tdoas(const MultiChannelClip& clip, double max_lag_s);

// Physical bound plus guard: 1.5 R / v_s.
double default_max_lag(const MicArray& array, double speed_of_sound = kSpeedOfSound);

struct DoAEstimate {
  Vec3 direction = Vec3(0, 0, -1);  // unit vector from the array toward the source
  double residual = 0.0;            // RMS of G g - V divided by the array radius
  int rank = 0;
  bool consistent = true;           // residual within the configured bound
};

// Least-squares direction from ring TDoAs. The ring is coplanar, so the planar
// part comes from a truncated pseudoinverse and the vertical part from the
// unit-norm constraint with the source below the array.
DoAEstimate solve_doa(const PosedArray& posed, const TdoaSet& tdoas, double speed_of_sound = kSpeedOfSound,
                      double residual_bound = 0.25);

}  // namespace skyear
