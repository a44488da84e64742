#include "omnivlc/precoder.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "omnivlc/csv.hpp"
#include "omnivlc/errors.hpp"
#include "omnivlc/rng.hpp"

namespace omnivlc {

PrecodingMatrix::PrecodingMatrix(Eigen::MatrixXd coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.size() == 0)
    throw std::invalid_argument("PrecodingMatrix: matrix is empty");
  for (Eigen::Index m = 0; m < coefficients_.rows(); ++m) {
    const double norm = coefficients_.row(m).norm();
    if (std::abs(norm - 1.0) > kRowNormTolerance)
      throw std::invalid_argument("PrecodingMatrix: row " + std::to_string(m) +
                                  " does not have unit norm");
  }
}

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0))
    throw std::invalid_argument("OptimizerConfig: step_size must be positive");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("OptimizerConfig: epsilon must be positive");
  if (max_iterations < 1)
    throw std::invalid_argument(
        "OptimizerConfig: max_iterations must be at least 1");
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& gains) {
  if (gains.size() == 0)
    throw std::invalid_argument("correlation_matrix: gain matrix is empty");
  return gains.transpose() * gains;
}

namespace {

void check_shapes(const Eigen::MatrixXd& precoder,
                  const Eigen::MatrixXd& correlation, const char* who) {
  if (correlation.rows() != correlation.cols())
    throw std::invalid_argument(std::string(who) +
                                ": correlation matrix must be square");
  if (precoder.rows() != correlation.rows())
    throw std::invalid_argument(std::string(who) +
                                ": precoder rows do not match correlation");
}

}  // namespace

double objective_value(const Eigen::MatrixXd& precoder,
                       const Eigen::MatrixXd& correlation) {
  check_shapes(precoder, correlation, "objective_value");
  return (precoder.array() * (correlation * precoder).array()).sum();
}

Eigen::MatrixXd cost_gradient(const Eigen::MatrixXd& precoder,
                              const Eigen::MatrixXd& correlation) {
  check_shapes(precoder, correlation, "cost_gradient");
  return -2.0 * correlation * precoder;
}

PrecodingMatrix project_rows(const Eigen::MatrixXd& raw) {
  if (raw.size() == 0)
    throw std::invalid_argument("project_rows: matrix is empty");
  Eigen::MatrixXd scaled = raw;
  for (Eigen::Index m = 0; m < scaled.rows(); ++m) {
    const double norm = scaled.row(m).norm();
    if (!(norm > 0.0))
      throw DegenerateRowError("project_rows: row " + std::to_string(m) +
                               " has zero norm");
    scaled.row(m) /= norm;
  }
  return PrecodingMatrix(std::move(scaled));
}

namespace {

bool stop_satisfied(const OptimizerConfig& config, double previous,
                    double current) {
  const double change = std::abs(current - previous);
  if (config.stop_mode == StopMode::kAbsolute) return change < config.epsilon;
  return change < config.epsilon *
                      std::max(std::abs(previous),
                               std::numeric_limits<double>::min());
}

}  // namespace

std::pair<PrecodingMatrix, OptTrace> optimize(const Eigen::MatrixXd& gains,
                                              int stream_count,
                                              const OptimizerConfig& config) {
  config.validate();
  if (stream_count < 1)
    throw std::invalid_argument("optimize: stream_count must be at least 1");
  if (gains.size() == 0 || gains.squaredNorm() == 0.0)
    throw NoSignalError("optimize: channel matrix carries no power");

  const Eigen::MatrixXd correlation = correlation_matrix(gains);
  PrecodingMatrix precoder = random_precoder(
      static_cast<int>(gains.cols()), stream_count, config.seed);

  OptTrace trace;
  trace.objective_history.reserve(
      static_cast<std::size_t>(config.max_iterations) + 1);
  trace.objective_history.push_back(
      objective_value(precoder.matrix(), correlation));

  for (int k = 0; k < config.max_iterations; ++k) {
    const Eigen::MatrixXd stepped =
        precoder.matrix() -
        config.step_size * cost_gradient(precoder.matrix(), correlation);
    precoder = project_rows(stepped);
    const double previous = trace.objective_history.back();
    const double current = objective_value(precoder.matrix(), correlation);
    trace.objective_history.push_back(current);
    trace.iterations_run = k + 1;
    if (stop_satisfied(config, previous, current)) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(precoder), std::move(trace)};
}

PrecodingMatrix random_precoder(int led_count, int stream_count,
                                std::uint64_t seed) {
  if (led_count < 1 || stream_count < 1)
    throw std::invalid_argument(
        "random_precoder: led_count and stream_count must be at least 1");
  RandomStream stream(seed);
  Eigen::MatrixXd draw(led_count, stream_count);
  for (Eigen::Index m = 0; m < draw.rows(); ++m)
    for (Eigen::Index t = 0; t < draw.cols(); ++t) draw(m, t) = stream.normal();
  return project_rows(draw);
}

void write_precoder_csv(std::ostream& out, const PrecodingMatrix& precoder) {
  const Eigen::MatrixXd& p = precoder.matrix();
  for (Eigen::Index m = 0; m < p.rows(); ++m) {
    for (Eigen::Index t = 0; t < p.cols(); ++t) {
      if (t > 0) out << ',';
      out << csv_double(p(m, t));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_precoder_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      std::size_t used = 0;
      const double value = std::stod(field, &used);
      row.push_back(value);
      (void)used;
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::invalid_argument("read_precoder_csv: no rows found");
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols)
      throw std::invalid_argument("read_precoder_csv: ragged rows");
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(cols));
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (std::size_t t = 0; t < cols; ++t)
      matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) =
          rows[m][t];
  return matrix;
}

}  // namespace omnivlc
