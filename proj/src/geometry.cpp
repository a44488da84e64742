#include "omnivlc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omnivlc {

RoomScenario::RoomScenario(double width, double length, double ceiling_height,
                           double work_plane_height)
    : width_(width),
      length_(length),
      ceiling_height_(ceiling_height),
      work_plane_height_(work_plane_height) {
  if (!(width > 0.0) || !(length > 0.0))
    throw std::invalid_argument(
        "RoomScenario: width and length must be positive");
  if (!(ceiling_height > 0.0))
    throw std::invalid_argument("RoomScenario: ceiling height must be positive");
  if (!(work_plane_height >= 0.0) || work_plane_height >= ceiling_height)
    throw std::invalid_argument(
        "RoomScenario: work plane height must lie in [0, ceiling height)");
}

LedArray::LedArray(int count_x, int count_y, double spacing_x, double spacing_y)
    : count_x_(count_x),
      count_y_(count_y),
      spacing_x_(spacing_x),
      spacing_y_(spacing_y) {
  if (count_x < 1 || count_y < 1)
    throw std::invalid_argument("LedArray: counts must be at least 1");
  if (!(spacing_x >= 0.0) || !(spacing_y >= 0.0))
    throw std::invalid_argument("LedArray: spacings must be nonnegative");
}

std::vector<Point3> led_offsets(const LedArray& array) {
  std::vector<Point3> points;
  points.reserve(static_cast<std::size_t>(array.total()));
  for (int i = 0; i < array.total(); ++i) {
    const int ix = i / array.count_y();
    const int iy = i % array.count_y();
    points.push_back({ix * array.spacing_x(), iy * array.spacing_y(), 0.0});
  }
  return points;
}

std::vector<Point3> led_positions(const LedArray& array,
                                  const RoomScenario& room) {
  std::vector<Point3> points = led_offsets(array);
  const double centroid_x = 0.5 * (array.count_x() - 1) * array.spacing_x();
  const double centroid_y = 0.5 * (array.count_y() - 1) * array.spacing_y();
  const double shift_x = 0.5 * room.width() - centroid_x;
  const double shift_y = 0.5 * room.length() - centroid_y;
  for (Point3& p : points) {
    p.x += shift_x;
    p.y += shift_y;
    p.z = room.ceiling_height();
  }
  return points;
}

namespace {

// Number of whole spacing steps that fit in extent. The nudge keeps decimal
// spacings honest: 5.0 / 0.1 must count as 50 steps even though 0.1 is not
// exactly representable.
int grid_steps(double extent, double spacing) {
  const double ratio = extent / spacing;
  return static_cast<int>(std::floor(ratio * (1.0 + 1e-12) + 1e-12));
}

}  // namespace

SampleGrid sample_work_plane(const RoomScenario& room, double spacing) {
  if (!(spacing > 0.0))
    throw std::invalid_argument("sample_work_plane: spacing must be positive");
  const int nx = grid_steps(room.width(), spacing);
  const int ny = grid_steps(room.length(), spacing);
  SampleGrid grid;
  grid.spacing = spacing;
  grid.points.reserve(static_cast<std::size_t>(nx + 1) *
                      static_cast<std::size_t>(ny + 1));
  for (int ix = 0; ix <= nx; ++ix) {
    const double x = std::min(ix * spacing, room.width());
    for (int iy = 0; iy <= ny; ++iy) {
      const double y = std::min(iy * spacing, room.length());
      grid.points.push_back({x, y, room.work_plane_height()});
    }
  }
  return grid;
}

}  // namespace omnivlc
