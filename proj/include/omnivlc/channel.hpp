#pragma once

#include <Eigen/Core>
#include <numbers>
#include <vector>

#include "omnivlc/geometry.hpp"

namespace omnivlc {

/// Photometric constants of the line-of-sight gain model.
struct ChannelParams {
  double pd_area = 1e-4;        // photodiode area, m^2
  double lambert_order = 1.0;   // beam directivity exponent of the source
  double filter_gain = 1.0;     // optical filter transmission, (0, 1]
  double concentrator_gain = 1.0;
  double fov_half_angle = 70.0 * std::numbers::pi / 180.0;  // radians

  /// Throws std::invalid_argument when any constant is out of range.
  void validate() const;
};

/// Geometric quantities of one LED-to-photodiode link. Angles are measured
/// from the LED's downward normal (emission) and the photodiode's upward
/// normal (incidence).
struct LinkGeometry {
  double distance = 0.0;
  double emission_angle = 0.0;
  double incidence_angle = 0.0;
};

/// Distance and angles between a ceiling LED and a receiver below it. Both
/// surfaces are horizontal, so the two angles coincide.
LinkGeometry link_geometry(const Point3& led, const Point3& pd);

/// Lambertian direct-path gain. Zero outside the receiver field of view and
/// for directions behind the emitter plane.
double los_gain(const LinkGeometry& geometry, const ChannelParams& params);

/// Gain matrix with one row per receiver location and one column per LED.
Eigen::MatrixXd channel_matrix(const std::vector<Point3>& leds,
                               const std::vector<Point3>& receivers,
                               const ChannelParams& params);

Eigen::MatrixXd channel_matrix(const std::vector<Point3>& leds,
                               const SampleGrid& grid,
                               const ChannelParams& params);

}  // namespace omnivlc
