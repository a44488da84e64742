#include "omnivlc/metrics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "omnivlc/csv.hpp"
#include "omnivlc/rng.hpp"

namespace omnivlc {

NoiseModel::NoiseModel(double variance) : variance_(variance) {
  if (!(variance > 0.0))
    throw std::invalid_argument("NoiseModel: variance must be positive");
}

double armp(const Eigen::MatrixXd& gains, const PrecodingMatrix& precoder) {
  if (gains.size() == 0)
    throw std::invalid_argument("armp: gain matrix is empty");
  if (gains.cols() != precoder.led_count())
    throw std::invalid_argument("armp: gain columns do not match LED count");
  const double count =
      static_cast<double>(gains.rows()) * static_cast<double>(gains.cols());
  return (gains * precoder.matrix()).squaredNorm() / count;
}

double classical_armp(const Eigen::MatrixXd& gains, int stream_count,
                      int draws, std::uint64_t seed) {
  if (gains.size() == 0)
    throw std::invalid_argument("classical_armp: gain matrix is empty");
  if (stream_count < 1)
    throw std::invalid_argument("classical_armp: stream_count must be >= 1");
  if (draws < 1)
    throw std::invalid_argument("classical_armp: draws must be >= 1");
  // trace(P^T R P) = ||H P||_F^2, so precomputing R once makes every draw
  // cost O(LEDs^2 * streams) no matter how many sample points there are.
  const Eigen::MatrixXd correlation = correlation_matrix(gains);
  const double count =
      static_cast<double>(gains.rows()) * static_cast<double>(gains.cols());
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const PrecodingMatrix draw =
        random_precoder(static_cast<int>(gains.cols()), stream_count,
                        derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    sum += objective_value(draw.matrix(), correlation) / count;
  }
  return sum / draws;
}

double achievable_rate(const Eigen::VectorXd& gains_row,
                       const PrecodingMatrix& precoder,
                       const NoiseModel& noise) {
  if (gains_row.size() != precoder.led_count())
    throw std::invalid_argument(
        "achievable_rate: gain row does not match LED count");
  const double signal =
      (precoder.matrix().transpose() * gains_row).squaredNorm();
  return std::log2(1.0 + signal / noise.variance());
}

PowerMap power_map(const Eigen::MatrixXd& gains,
                   const PrecodingMatrix& precoder, const SampleGrid& grid) {
  if (static_cast<Eigen::Index>(grid.points.size()) != gains.rows())
    throw std::invalid_argument(
        "power_map: grid size does not match gain rows");
  const Eigen::MatrixXd projected = gains * precoder.matrix();
  PowerMap map;
  map.values.resize(grid.points.size());
  double sum = 0.0;
  for (Eigen::Index j = 0; j < projected.rows(); ++j) {
    const double value = projected.row(j).squaredNorm();
    map.values[static_cast<std::size_t>(j)] = value;
    sum += value;
  }
  map.armp = sum / (static_cast<double>(gains.rows()) *
                    static_cast<double>(gains.cols()));
  return map;
}

void write_power_map_csv(std::ostream& out, const PowerMap& map,
                         const SampleGrid& grid) {
  if (map.values.size() != grid.points.size())
    throw std::invalid_argument(
        "write_power_map_csv: map does not match grid");
  out << "x,y,power\n";
  for (std::size_t j = 0; j < map.values.size(); ++j) {
    out << csv_double(grid.points[j].x) << ',' << csv_double(grid.points[j].y)
        << ',' << csv_double(map.values[j]) << '\n';
  }
  out << "# armp=" << csv_double(map.armp) << '\n';
}

}  // namespace omnivlc
