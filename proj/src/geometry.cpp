#include "skyear/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "skyear/error.hpp"

namespace skyear {

MicArray MicArray::from_positions(std::vector<Vec3> positions, double radius) {
  return MicArray(std::move(positions), radius);
}

MicArray build_circular_array(int count, double radius) {
  if (count < 4) {
    throw Error(ErrorCode::InsufficientMics,
                "circular array needs at least 4 mics, got " + std::to_string(count));
  }
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::NonPositiveRadius, "array radius must be positive");
  }
  std::vector<Vec3> positions;
  positions.reserve(static_cast<std::size_t>(count));
  positions.emplace_back(Vec3::Zero());
  const int ring = count - 1;
  for (int m = 0; m < ring; ++m) {
    const double angle = 2.0 * std::numbers::pi * m / ring;
    positions.emplace_back(radius * std::cos(angle), radius * std::sin(angle), 0.0);
  }
  return MicArray(std::move(positions), radius);
}

PosedArray pose_at(const MicArray& array, const Vec3& position) { return PosedArray(array, position); }

}  // namespace skyear
