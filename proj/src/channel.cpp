#include "omnivlc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omnivlc {

void ChannelParams::validate() const {
  if (!(pd_area > 0.0))
    throw std::invalid_argument("ChannelParams: pd_area must be positive");
  if (!(lambert_order > 0.0))
    throw std::invalid_argument("ChannelParams: lambert_order must be positive");
  if (!(filter_gain > 0.0) || filter_gain > 1.0)
    throw std::invalid_argument("ChannelParams: filter_gain must be in (0, 1]");
  if (!(concentrator_gain > 0.0))
    throw std::invalid_argument(
        "ChannelParams: concentrator_gain must be positive");
  if (!(fov_half_angle > 0.0) || fov_half_angle > 0.5 * std::numbers::pi)
    throw std::invalid_argument(
        "ChannelParams: fov_half_angle must be in (0, pi/2]");
}

LinkGeometry link_geometry(const Point3& led, const Point3& pd) {
  const double dx = led.x - pd.x;
  const double dy = led.y - pd.y;
  const double dz = led.z - pd.z;
  const double distance = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (distance == 0.0)
    throw std::invalid_argument("link_geometry: LED and receiver coincide");
  if (!(dz > 0.0))
    throw std::invalid_argument(
        "link_geometry: LED must be strictly above the receiver");
  // Emission is measured against the LED's -z normal, incidence against the
  // receiver's +z normal; with both surfaces horizontal the angles coincide.
  const double cosine = std::clamp(dz / distance, -1.0, 1.0);
  const double angle = std::acos(cosine);
  return {distance, angle, angle};
}

double los_gain(const LinkGeometry& geometry, const ChannelParams& params) {
  if (geometry.incidence_angle > params.fov_half_angle) return 0.0;
  const double cos_emission = std::cos(geometry.emission_angle);
  if (cos_emission <= 0.0) return 0.0;  // behind the emitter plane
  const double cos_incidence = std::cos(geometry.incidence_angle);
  const double d2 = geometry.distance * geometry.distance;
  return params.pd_area * (params.lambert_order + 1.0) /
         (2.0 * std::numbers::pi * d2) *
         std::pow(cos_emission, params.lambert_order) * cos_incidence *
         params.filter_gain * params.concentrator_gain;
}

Eigen::MatrixXd channel_matrix(const std::vector<Point3>& leds,
                               const std::vector<Point3>& receivers,
                               const ChannelParams& params) {
  if (leds.empty())
    throw std::invalid_argument("channel_matrix: LED list is empty");
  if (receivers.empty())
    throw std::invalid_argument("channel_matrix: receiver list is empty");
  params.validate();
  Eigen::MatrixXd gains(static_cast<Eigen::Index>(receivers.size()),
                        static_cast<Eigen::Index>(leds.size()));
  for (std::size_t j = 0; j < receivers.size(); ++j)
    for (std::size_t i = 0; i < leds.size(); ++i)
      gains(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          los_gain(link_geometry(leds[i], receivers[j]), params);
  return gains;
}

Eigen::MatrixXd channel_matrix(const std::vector<Point3>& leds,
                               const SampleGrid& grid,
                               const ChannelParams& params) {
  return channel_matrix(leds, grid.points, params);
}

}  // namespace omnivlc
