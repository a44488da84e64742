#pragma once

#include <vector>

namespace omnivlc {

/// Room coordinates in meters. The origin is a floor corner, z points up.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Rectangular room with the LED panel on the ceiling and the receivers on a
/// horizontal work plane somewhere below it.
class RoomScenario {
 public:
  RoomScenario(double width, double length, double ceiling_height,
               double work_plane_height);

  double width() const { return width_; }
  double length() const { return length_; }
  double ceiling_height() const { return ceiling_height_; }
  double work_plane_height() const { return work_plane_height_; }

 private:
  double width_;
  double length_;
  double ceiling_height_;
  double work_plane_height_;
};

/// Uniform rectangular LED grid, spacings in meters. Zero spacing is allowed
/// and collapses the array onto a single point.
class LedArray {
 public:
  LedArray(int count_x, int count_y, double spacing_x, double spacing_y);

  int count_x() const { return count_x_; }
  int count_y() const { return count_y_; }
  double spacing_x() const { return spacing_x_; }
  double spacing_y() const { return spacing_y_; }
  int total() const { return count_x_ * count_y_; }

 private:
  int count_x_;
  int count_y_;
  double spacing_x_;
  double spacing_y_;
};

/// Candidate receiver locations on the work plane, in a fixed traversal
/// order (x outer, y inner).
struct SampleGrid {
  std::vector<Point3> points;
  double spacing = 0.0;
};

/// Array-local LED coordinates: LED 0 at the origin, x advancing every
/// count_y elements, y cycling within a column group, z = 0.
std::vector<Point3> led_offsets(const LedArray& array);

/// LED positions in room coordinates: the local offsets translated so that
/// the array centroid sits at the ceiling center.
std::vector<Point3> led_positions(const LedArray& array,
                                  const RoomScenario& room);

/// Uniform grid over the room footprint at work-plane height. Both borders
/// are included, so a 5 m x 6 m room at 0.1 m spacing gives 51 x 61 points.
SampleGrid sample_work_plane(const RoomScenario& room, double spacing);

}  // namespace omnivlc
