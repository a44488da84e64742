#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "omnivlc/channel.hpp"
#include "omnivlc/geometry.hpp"
#include "omnivlc/link_sim.hpp"
#include "omnivlc/metrics.hpp"
#include "omnivlc/precoder.hpp"

namespace omnivlc {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExperimentKind {
  kConvergence,
  kSweepLedCount,
  kSweepSpacing,
  kSweepHeight,
  kBer,
  kPowerMap,
};

std::string to_string(ExperimentKind kind);

/// Fully resolved experiment description. Parsed from JSON with strict key
/// checking; defaults below describe the reference room so that a config
/// only has to name what deviates.
struct ExperimentConfig {
  int schema_version = 1;
  ExperimentKind kind = ExperimentKind::kConvergence;
  std::string notes;

  double room_width = 5.0;
  double room_length = 6.0;
  double ceiling_height = 3.0;
  double work_plane_height = 0.0;

  int count_x = 3;
  int count_y = 3;
  double spacing_x = 0.02;
  double spacing_y = 0.02;

  ChannelParams channel;
  OptimizerConfig optimizer;

  int streams = 10;
  double grid_spacing = 0.1;

  // Swept values; meaning depends on kind (total LED counts, spacings in
  // meters, or work plane heights in meters).
  std::vector<double> sweep;
  int baseline_draws = 1000;

  BerConfig ber;

  std::string output;

  RoomScenario room() const;
  LedArray array() const;

  /// Cross-field validation; throws ConfigValidationError naming the field.
  void validate() const;
};

/// Parses and validates a JSON document (// comments allowed). Throws
/// ConfigParseError for syntax problems, ConfigValidationError otherwise.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

struct ConvergenceRun {
  PrecodingMatrix precoder;
  OptTrace trace;
};

struct SweepRun {
  std::string parameter;
  std::vector<double> values;
  std::vector<double> armp_optimized;
  std::vector<double> armp_classical;
  std::vector<int> iterations;
  std::vector<bool> converged;
};

struct PowerMapRun {
  PrecodingMatrix precoder;
  SampleGrid grid;
  PowerMap map;
};

ConvergenceRun run_convergence(const ExperimentConfig& config);
SweepRun run_sweep(const ExperimentConfig& config);
BerResult run_ber(const ExperimentConfig& config);
PowerMapRun run_power_map(const ExperimentConfig& config);

/// Leading comment block shared by all result files: tool version, seed, and
/// a canonical JSON echo of the resolved config.
void write_metadata(std::ostream& out, const ExperimentConfig& config);

void write_convergence_csv(std::ostream& out, const ConvergenceRun& run,
                           const ExperimentConfig& config);
void write_sweep_csv(std::ostream& out, const SweepRun& run,
                     const ExperimentConfig& config);
void write_ber_results_csv(std::ostream& out, const BerResult& result,
                           const ExperimentConfig& config);
void write_ber_user_results_csv(std::ostream& out, const BerResult& result,
                                const ExperimentConfig& config);
void write_power_map_results_csv(std::ostream& out, const PowerMapRun& run,
                                 const ExperimentConfig& config);

}  // namespace omnivlc
