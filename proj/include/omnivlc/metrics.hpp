#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "omnivlc/geometry.hpp"
#include "omnivlc/precoder.hpp"

namespace omnivlc {

/// Additive noise with a fixed variance per received sample.
class NoiseModel {
 public:
  explicit NoiseModel(double variance);
  double variance() const { return variance_; }

 private:
  double variance_;
};

/// Received mean power averaged over receiver locations and normalized by
/// the LED count: ||H P||_F^2 / (locations * LEDs).
double armp(const Eigen::MatrixXd& gains, const PrecodingMatrix& precoder);

/// Baseline figure: the armp value averaged over `draws` independent random
/// precoders. Deterministic per seed; draw i uses derive_seed(seed, {i}).
double classical_armp(const Eigen::MatrixXd& gains, int stream_count,
                      int draws, std::uint64_t seed);

/// log2(1 + ||h^T P||^2 / variance), bits per channel use, for the receiver
/// with gain row h.
double achievable_rate(const Eigen::VectorXd& gains_row,
                       const PrecodingMatrix& precoder,
                       const NoiseModel& noise);

/// Received mean power at every sample point plus the ARMP summary value.
struct PowerMap {
  std::vector<double> values;
  double armp = 0.0;
};

PowerMap power_map(const Eigen::MatrixXd& gains,
                   const PrecodingMatrix& precoder, const SampleGrid& grid);

/// Columns x,y,power; one row per sample point; final comment line carries
/// the ARMP summary.
void write_power_map_csv(std::ostream& out, const PowerMap& map,
                         const SampleGrid& grid);

}  // namespace omnivlc
