#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "omnivlc/metrics.hpp"
#include "omnivlc/precoder.hpp"

namespace omnivlc {

/// Monte Carlo settings for the on-off keying link simulation.
struct BerConfig {
  int n_users = 15;
  std::int64_t n_bits = 100000;      // payload bits per user per noise point
  std::vector<double> noise_sweep;   // sample noise variances
  int trials = 1;                    // averaged repetitions per point
  std::uint64_t seed = 1;
  int pilot_repeats = 1;             // pilot observations averaged per stream
  bool known_channel = false;        // skip estimation, use exact gains

  void validate() const;
};

/// Ten log-spaced noise variances spanning the range where a small ceiling
/// array drives the error rate from negligible through the 1e-3 regime.
std::vector<double> default_noise_sweep();

/// Pilot-based estimate of the effective per-stream gains h^T P: each stream
/// is keyed once per repeat and the noisy observations are averaged.
Eigen::VectorXd estimate_effective_channel(const Eigen::VectorXd& gains_row,
                                           const PrecodingMatrix& precoder,
                                           const NoiseModel& noise,
                                           std::uint64_t seed,
                                           int pilot_repeats = 1);

/// On-off keying error fraction for one user at one noise level. Symbol
/// slots cycle through the precoder columns; detection thresholds come from
/// the pilot estimate (or the exact gains when known_channel is set).
/// Throws UncoverableUserError when every effective gain is zero.
double simulate_ber(const Eigen::VectorXd& gains_row,
                    const PrecodingMatrix& precoder, const BerConfig& config,
                    const NoiseModel& noise);

/// Error rates of the optimized and baseline precoders over a shared user
/// population. Entries are NaN for users outside coverage; means skip them.
struct BerResult {
  std::vector<double> noise_sweep;
  std::vector<double> mean_ber_proposed;
  std::vector<double> mean_ber_classical;
  Eigen::MatrixXd user_ber_proposed;   // noise points x users
  Eigen::MatrixXd user_ber_classical;  // noise points x users
  std::vector<int> uncoverable_users;
};

/// Runs both precoders over every user and noise level. The same noise
/// substream is used for both precoders at a given (user, noise, trial), so
/// the comparison is paired.
BerResult ber_experiment(const Eigen::MatrixXd& user_gains,
                         const PrecodingMatrix& proposed,
                         const PrecodingMatrix& classical,
                         const BerConfig& config);

/// Columns delta_sq,ber_proposed,ber_classical; one row per noise point.
void write_ber_csv(std::ostream& out, const BerResult& result);

/// Per-user breakdown: delta_sq,method,user,ber.
void write_ber_user_csv(std::ostream& out, const BerResult& result);

}  // namespace omnivlc
