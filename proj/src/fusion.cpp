#include "skyear/fusion.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <numeric>
#include <string>

#include "skyear/error.hpp"

namespace skyear {

double observation_weight(const TdoaSet& tdoas) {
  if (tdoas.peaks.empty()) return 0.0;
  return std::accumulate(tdoas.peaks.begin(), tdoas.peaks.end(), 0.0) / static_cast<double>(tdoas.peaks.size());
}

double observation_weight(const MultiChannelClip& clip, double max_lag_s) {
  return observation_weight(compute_tdoas(clip, max_lag_s));
}

Eigen::Matrix3d projector(const Vec3& direction) {
  return Eigen::Matrix3d::Identity() - direction * direction.transpose();
}

FusedEstimate fuse(std::span<const Observation> observations) {
  if (observations.size() < 2) {
    throw Error(ErrorCode::TooFewObservations, "need at least 2 observations, got " + std::to_string(observations.size()));
  }
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double total_weight = 0.0;
  double lowest = observations.front().position.z();
  for (const Observation& o : observations) {
    const Eigen::Matrix3d P = projector(o.direction);
    A += o.weight * P;
    b += o.weight * P * o.position;
    total_weight += o.weight;
    lowest = std::min(lowest, o.position.z());
  }
  if (!(total_weight > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "observation weights sum to zero");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(A, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(2);
  if (lmin < 1e-8 * lmax) throw Error(ErrorCode::DegenerateGeometry, "observation rays are (nearly) parallel");
  FusedEstimate est;
  est.position = A.ldlt().solve(b);
  est.condition = lmax / lmin;
  est.used = static_cast<int>(observations.size());
  est.above_uav = est.position.z() > lowest;
  return est;
}

double fusion_objective(std::span<const Observation> observations, const Vec3& s) {
  double total = 0.0;
  for (const Observation& o : observations) total += o.weight * (projector(o.direction) * (s - o.position)).squaredNorm();
  return total;
}

}  // namespace skyear
