#pragma once

#include <span>
#include <vector>

#include "skyear/geometry.hpp"
#include "skyear/localization.hpp"

namespace skyear {

struct Observation {
  Vec3 position;   // UAV position p_k
  Vec3 direction;  // unit DoA
  double weight = 1.0;
  double time = 0.0;
};

struct FusedEstimate {
  Vec3 position = Vec3::Zero();
  double condition = 0.0;  // eigenvalue ratio of the normal matrix
  int used = 0;
  bool above_uav = false;  // estimate higher than the lowest observing UAV position
};

// Mean GCC-PHAT peak of the ring channels against the center channel.
double observation_weight(const TdoaSet& tdoas);
double observation_weight(const MultiChannelClip& clip, double max_lag_s);

Eigen::Matrix3d projector(const Vec3& direction);

// Weighted least-squares point closest to all observation lines.
FusedEstimate fuse(std::span<const Observation> observations);

// Objective the fused point minimizes: sum_k w_k |Proj_k (s - p_k)|^2.
double fusion_objective(std::span<const Observation> observations, const Vec3& s);

}  // namespace skyear
