#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace omnivlc {

/// Precoder with unit-norm rows: one row per LED, one column per symbol
/// stream. Unit rows pin the mean electrical power spent by every LED, which
/// is the feasible set the optimizer walks on.
class PrecodingMatrix {
 public:
  static constexpr double kRowNormTolerance = 1e-9;

  /// Throws std::invalid_argument unless every row norm is 1 within
  /// kRowNormTolerance.
  explicit PrecodingMatrix(Eigen::MatrixXd coefficients);

  const Eigen::MatrixXd& matrix() const { return coefficients_; }
  Eigen::Index led_count() const { return coefficients_.rows(); }
  Eigen::Index stream_count() const { return coefficients_.cols(); }

 private:
  Eigen::MatrixXd coefficients_;
};

enum class StopMode {
  kAbsolute,  // stop when |change| < epsilon
  kRelative,  // stop when |change| < epsilon * max(|previous|, tiny)
};

struct OptimizerConfig {
  double step_size = 1e8;
  double epsilon = 1e-4;
  int max_iterations = 500;
  StopMode stop_mode = StopMode::kRelative;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Objective values recorded after the initial draw and after every
/// projected step, plus how the run ended.
struct OptTrace {
  std::vector<double> objective_history;
  int iterations_run = 0;
  bool converged = false;
};

/// Gram matrix of the channel, R = H^T H. Every objective and gradient
/// evaluation runs through R, which makes an optimizer step independent of
/// the number of receiver locations.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& gains);

/// Total received sample power, trace(P^T R P) = ||H P||_F^2. Accepts any
/// matrix of matching shape, on or off the unit-row manifold.
double objective_value(const Eigen::MatrixXd& precoder,
                       const Eigen::MatrixXd& correlation);

/// Gradient of the minimization cost (the negated objective): -2 R P.
Eigen::MatrixXd cost_gradient(const Eigen::MatrixXd& precoder,
                              const Eigen::MatrixXd& correlation);

/// Scales every row to unit norm. Throws DegenerateRowError on a zero row.
PrecodingMatrix project_rows(const Eigen::MatrixXd& raw);

/// Projected gradient ascent over unit-row precoders: step along 2 R P, then
/// renormalize each row. Starts from a seeded random precoder and stops when
/// the objective change satisfies the configured rule.
std::pair<PrecodingMatrix, OptTrace> optimize(const Eigen::MatrixXd& gains,
                                              int stream_count,
                                              const OptimizerConfig& config);

/// Row-normalized i.i.d. standard normal draw, deterministic per seed. This
/// is the classical baseline precoder and the optimizer's starting point.
PrecodingMatrix random_precoder(int led_count, int stream_count,
                                std::uint64_t seed);

/// One LED per line, entries comma separated, full double precision.
void write_precoder_csv(std::ostream& out, const PrecodingMatrix& precoder);

/// Reads the write_precoder_csv layout back. Returns a raw matrix so that
/// externally produced files with looser row norms can still be inspected.
Eigen::MatrixXd read_precoder_csv(std::istream& in);

}  // namespace omnivlc
