#include "skyear/localization.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "skyear/error.hpp"
#include "skyear/fft.hpp"

namespace skyear {

namespace {

using Spectrum = std::vector<std::complex<double>>;

bool all_zero(const Waveform& w) {
  return std::all_of(w.samples.begin(), w.samples.end(), [](double v) { return v == 0.0; });
}

Spectrum padded_spectrum(RealFft& fft, const Waveform& w) {
  std::vector<double> buf(static_cast<std::size_t>(fft.size()), 0.0);
  std::copy(w.samples.begin(), w.samples.end(), buf.begin());
  Spectrum out(static_cast<std::size_t>(fft.bins()));
  fft.forward(buf, out);
  return out;
}

TdoaEstimate phat_peak(RealFft& fft, const Spectrum& x, const Spectrum& ref, int max_lag, double fs) {
  Spectrum cross(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::complex<double> c = x[k] * std::conj(ref[k]);
    const double mag = std::abs(c);
    cross[k] = mag < 1e-12 ? std::complex<double>(0.0) : c / mag;
  }
  const int n = fft.size();
  std::vector<double> corr(static_cast<std::size_t>(n));
  fft.inverse(cross, corr);
  auto at = [&](int lag) { return corr[static_cast<std::size_t>((lag % n + n) % n)] / n; };

  int best = 0;
  double best_value = at(0);
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    if (const double v = at(lag); v > best_value) {
      best_value = v;
      best = lag;
    }
  }
  const double ym = at(best - 1), y0 = best_value, yp = at(best + 1);
  const double denom = ym - 2.0 * y0 + yp;
  double offset = 0.0;
  if (denom < 0.0) offset = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
  TdoaEstimate est;
  est.lag = best;
  est.tdoa = (best + offset) / fs;
  est.peak = y0 - 0.25 * (ym - yp) * offset;
  return est;
}

void check_pair(const Waveform& x, const Waveform& ref, double max_lag_s) {
  if (x.size() != ref.size() || x.size() < 256 || x.fs != ref.fs) {
    throw Error(ErrorCode::LengthMismatch, "GCC-PHAT inputs must share a length of at least 256 samples");
  }
  if (!(max_lag_s >= 0.0) || max_lag_s * x.fs >= 0.5 * static_cast<double>(x.size())) {
    throw Error(ErrorCode::LengthMismatch, "max lag must be below half the window length");
  }
  if (all_zero(x) || all_zero(ref)) throw Error(ErrorCode::DegenerateInput, "GCC-PHAT input is all zeros");
}

}  // namespace

TdoaEstimate gcc_phat(const Waveform& x, const Waveform& ref, double max_lag_s) {
  check_pair(x, ref, max_lag_s);
  RealFft fft(next_pow2(2 * static_cast<int>(x.size())));
  const int max_lag = static_cast<int>(std::floor(max_lag_s * x.fs));
  return phat_peak(fft, padded_spectrum(fft, x), padded_spectrum(fft, ref), max_lag, x.fs);
}

TdoaSet compute_tdoas(const MultiChannelClip& clip, double max_lag_s) {
  clip.validate();
  if (clip.count() < 2) throw Error(ErrorCode::ChannelMismatch, "need at least two channels");
  const Waveform& ref = clip.channels.front();
  for (const Waveform& ch : clip.channels) check_pair(ch, ref, max_lag_s);
  RealFft fft(next_pow2(2 * static_cast<int>(clip.length())));
  const Spectrum ref_spec = padded_spectrum(fft, ref);
  const int max_lag = static_cast<int>(std::floor(max_lag_s * clip.fs()));
  TdoaSet set;
  for (int m = 1; m < clip.count(); ++m) {
    const TdoaEstimate est = phat_peak(fft, padded_spectrum(fft, clip.channels[static_cast<std::size_t>(m)]), ref_spec,
                                       max_lag, clip.fs());
    set.delays.push_back(est.tdoa);
    set.peaks.push_back(est.peak);
  }
  return set;
}

double default_max_lag(const MicArray& array, double speed_of_sound) { return 1.5 * array.radius() / speed_of_sound; }

DoAEstimate solve_doa(const PosedArray& posed, const TdoaSet& tdoas, double speed_of_sound, double residual_bound) {
  const MicArray& array = posed.array();
  const int rows = array.count() - 1;
  if (rows < 1 || static_cast<int>(tdoas.delays.size()) != rows) {
    throw Error(ErrorCode::ShapeMismatch, "TDoA count does not match the array");
  }
  Eigen::MatrixXd G(rows, 3);
  Eigen::VectorXd V(rows);
  for (int m = 1; m <= rows; ++m) {
    G.row(m - 1) = (array.position(m) - array.position(0)).transpose();
    V(m - 1) = tdoas.delays[static_cast<std::size_t>(m - 1)] * speed_of_sound;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-10 * sv(0);
  int rank = 0;
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv_sv(i) = 1.0 / sv(i);
      ++rank;
    }
  }
  if (rank < 2) throw Error(ErrorCode::RankDeficient, "ring offsets span fewer than 2 dimensions");
  const Eigen::Vector3d g = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() * V;

  DoAEstimate est;
  est.rank = rank;
  est.residual = std::sqrt((G * g - V).squaredNorm() / rows) / array.radius();
  est.consistent = est.residual <= residual_bound;
  // TDoA_m v_s = -(r_m - r_0) . u for a far source along u, so g points away from it.
  Vec3 u = -g;
  if (rank == 2) {
    Eigen::Vector2d planar = u.head<2>();
    const double norm = planar.norm();
    if (norm > 1.0) planar /= norm;
    u = Vec3(planar.x(), planar.y(), -std::sqrt(std::max(0.0, 1.0 - planar.squaredNorm())));
  }
  est.direction = u.normalized();
  return est;
}

}  // namespace skyear
