#pragma once

#include <Eigen/Core>
#include <vector>

namespace skyear {

using Vec3 = Eigen::Vector3d;

// Circular array: mic 0 at the center, mics 1..M-1 uniformly spaced on a
// horizontal ring of radius R, mic 1 on the +x axis. Body frame, meters.
class MicArray {
 public:
  int count() const { return static_cast<int>(positions_.size()); }
  double radius() const { return radius_; }
  const Vec3& position(int m) const { return positions_.at(static_cast<std::size_t>(m)); }
  const std::vector<Vec3>& positions() const { return positions_; }

  // Bypasses the M >= 4 guard; used to construct degenerate layouts on purpose.
  static MicArray from_positions(std::vector<Vec3> positions, double radius);

 private:
  friend MicArray build_circular_array(int count, double radius);
  MicArray(std::vector<Vec3> positions, double radius)
      : positions_(std::move(positions)), radius_(radius) {}

  std::vector<Vec3> positions_;
  double radius_ = 0.0;
};

MicArray build_circular_array(int count, double radius);

// Array translated to a world position. No rotation: the ring stays horizontal.
class PosedArray {
 public:
  PosedArray(MicArray array, Vec3 position) : array_(std::move(array)), position_(position) {}

  const MicArray& array() const { return array_; }
  const Vec3& position() const { return position_; }
  int count() const { return array_.count(); }
  Vec3 world(int m) const { return position_ + array_.position(m); }

 private:
  MicArray array_;
  Vec3 position_;
};

PosedArray pose_at(const MicArray& array, const Vec3& position);

}  // namespace skyear
