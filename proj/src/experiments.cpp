#include "omnivlc/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "omnivlc/csv.hpp"
#include "omnivlc/errors.hpp"
#include "omnivlc/rng.hpp"

namespace omnivlc {

using nlohmann::json;

namespace {

// Substream tags for per-point and per-role seed derivation.
constexpr std::uint64_t kOptimizerTag = 1;
constexpr std::uint64_t kBaselineTag = 2;
constexpr std::uint64_t kUserPositionTag = 11;
constexpr std::uint64_t kClassicalDrawTag = 12;

bool is_perfect_square(double value, int* side_out) {
  if (!(value >= 1.0) || value != std::floor(value)) return false;
  const double side = std::round(std::sqrt(value));
  if (side * side != value) return false;
  if (side_out) *side_out = static_cast<int>(side);
  return true;
}

[[noreturn]] void fail(const std::string& message) {
  throw ConfigValidationError(message);
}

std::string joined(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) fail("unknown key '" + joined(prefix, item.key()) + "'");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_double(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path + " must be a number");
  return value.get<double>();
}

int as_int(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path + " must be an integer");
  return value.get<int>();
}

std::int64_t as_int64(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path + " must be an integer");
  return value.get<std::int64_t>();
}

std::uint64_t as_u64(const json& value, const std::string& path) {
  if (!value.is_number_integer() || (value.is_number_integer() &&
                                     value.get<std::int64_t>() < 0 &&
                                     !value.is_number_unsigned()))
    fail(path + " must be a nonnegative integer");
  return value.get<std::uint64_t>();
}

bool as_bool(const json& value, const std::string& path) {
  if (!value.is_boolean()) fail(path + " must be a boolean");
  return value.get<bool>();
}

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) fail(path + " must be a string");
  return value.get<std::string>();
}

std::vector<double> as_double_array(const json& value,
                                    const std::string& path) {
  if (!value.is_array()) fail(path + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    out.push_back(
        as_double(value[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

bool is_sweep_kind(ExperimentKind kind) {
  return kind == ExperimentKind::kSweepLedCount ||
         kind == ExperimentKind::kSweepSpacing ||
         kind == ExperimentKind::kSweepHeight;
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "convergence") return ExperimentKind::kConvergence;
  if (name == "sweep_led_count") return ExperimentKind::kSweepLedCount;
  if (name == "sweep_spacing") return ExperimentKind::kSweepSpacing;
  if (name == "sweep_height") return ExperimentKind::kSweepHeight;
  if (name == "ber") return ExperimentKind::kBer;
  if (name == "power_map") return ExperimentKind::kPowerMap;
  fail("kind must be one of convergence, sweep_led_count, sweep_spacing, "
       "sweep_height, ber, power_map");
}

void parse_room(const json& obj, ExperimentConfig& cfg) {
  reject_unknown(obj, "room",
                 {"width", "length", "ceiling_height", "work_plane_height"});
  const json* width = find(obj, "width");
  const json* length = find(obj, "length");
  const json* ceiling = find(obj, "ceiling_height");
  if (!width || !length || !ceiling)
    fail("room requires width, length, and ceiling_height");
  cfg.room_width = as_double(*width, "room.width");
  cfg.room_length = as_double(*length, "room.length");
  cfg.ceiling_height = as_double(*ceiling, "room.ceiling_height");
  if (const json* value = find(obj, "work_plane_height"))
    cfg.work_plane_height = as_double(*value, "room.work_plane_height");
}

void parse_array(const json& obj, ExperimentConfig& cfg) {
  reject_unknown(obj, "array",
                 {"count_x", "count_y", "spacing_x", "spacing_y"});
  if (const json* value = find(obj, "count_x"))
    cfg.count_x = as_int(*value, "array.count_x");
  if (const json* value = find(obj, "count_y"))
    cfg.count_y = as_int(*value, "array.count_y");
  if (const json* value = find(obj, "spacing_x"))
    cfg.spacing_x = as_double(*value, "array.spacing_x");
  if (const json* value = find(obj, "spacing_y"))
    cfg.spacing_y = as_double(*value, "array.spacing_y");
}

void parse_channel(const json& obj, ExperimentConfig& cfg) {
  reject_unknown(obj, "channel",
                 {"pd_area", "lambert_order", "filter_gain",
                  "concentrator_gain", "fov_half_angle_deg"});
  if (const json* value = find(obj, "pd_area"))
    cfg.channel.pd_area = as_double(*value, "channel.pd_area");
  if (const json* value = find(obj, "lambert_order"))
    cfg.channel.lambert_order = as_double(*value, "channel.lambert_order");
  if (const json* value = find(obj, "filter_gain"))
    cfg.channel.filter_gain = as_double(*value, "channel.filter_gain");
  if (const json* value = find(obj, "concentrator_gain"))
    cfg.channel.concentrator_gain =
        as_double(*value, "channel.concentrator_gain");
  if (const json* value = find(obj, "fov_half_angle_deg"))
    cfg.channel.fov_half_angle =
        as_double(*value, "channel.fov_half_angle_deg") * std::numbers::pi /
        180.0;
}

void parse_optimizer(const json& obj, ExperimentConfig& cfg) {
  reject_unknown(obj, "optimizer",
                 {"step_size", "epsilon", "max_iterations", "stop_mode",
                  "seed"});
  if (const json* value = find(obj, "step_size"))
    cfg.optimizer.step_size = as_double(*value, "optimizer.step_size");
  if (const json* value = find(obj, "epsilon"))
    cfg.optimizer.epsilon = as_double(*value, "optimizer.epsilon");
  if (const json* value = find(obj, "max_iterations"))
    cfg.optimizer.max_iterations =
        as_int(*value, "optimizer.max_iterations");
  if (const json* value = find(obj, "stop_mode")) {
    const std::string mode = as_string(*value, "optimizer.stop_mode");
    if (mode == "relative")
      cfg.optimizer.stop_mode = StopMode::kRelative;
    else if (mode == "absolute")
      cfg.optimizer.stop_mode = StopMode::kAbsolute;
    else
      fail("optimizer.stop_mode must be 'relative' or 'absolute'");
  }
  if (const json* value = find(obj, "seed"))
    cfg.optimizer.seed = as_u64(*value, "optimizer.seed");
}

void parse_ber(const json& obj, ExperimentConfig& cfg) {
  reject_unknown(obj, "ber",
                 {"n_users", "n_bits", "noise_sweep", "trials", "seed",
                  "pilot_repeats", "known_channel"});
  if (const json* value = find(obj, "n_users"))
    cfg.ber.n_users = as_int(*value, "ber.n_users");
  if (const json* value = find(obj, "n_bits"))
    cfg.ber.n_bits = as_int64(*value, "ber.n_bits");
  if (const json* value = find(obj, "noise_sweep"))
    cfg.ber.noise_sweep = as_double_array(*value, "ber.noise_sweep");
  if (const json* value = find(obj, "trials"))
    cfg.ber.trials = as_int(*value, "ber.trials");
  if (const json* value = find(obj, "seed"))
    cfg.ber.seed = as_u64(*value, "ber.seed");
  if (const json* value = find(obj, "pilot_repeats"))
    cfg.ber.pilot_repeats = as_int(*value, "ber.pilot_repeats");
  if (const json* value = find(obj, "known_channel"))
    cfg.ber.known_channel = as_bool(*value, "ber.known_channel");
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;
  doc["kind"] = to_string(cfg.kind);
  doc["notes"] = cfg.notes;
  doc["room"] = {{"width", cfg.room_width},
                 {"length", cfg.room_length},
                 {"ceiling_height", cfg.ceiling_height},
                 {"work_plane_height", cfg.work_plane_height}};
  doc["array"] = {{"count_x", cfg.count_x},
                  {"count_y", cfg.count_y},
                  {"spacing_x", cfg.spacing_x},
                  {"spacing_y", cfg.spacing_y}};
  doc["channel"] = {
      {"pd_area", cfg.channel.pd_area},
      {"lambert_order", cfg.channel.lambert_order},
      {"filter_gain", cfg.channel.filter_gain},
      {"concentrator_gain", cfg.channel.concentrator_gain},
      {"fov_half_angle_deg",
       cfg.channel.fov_half_angle * 180.0 / std::numbers::pi}};
  doc["optimizer"] = {
      {"step_size", cfg.optimizer.step_size},
      {"epsilon", cfg.optimizer.epsilon},
      {"max_iterations", cfg.optimizer.max_iterations},
      {"stop_mode",
       cfg.optimizer.stop_mode == StopMode::kRelative ? "relative"
                                                      : "absolute"},
      {"seed", cfg.optimizer.seed}};
  doc["streams"] = cfg.streams;
  doc["grid_spacing"] = cfg.grid_spacing;
  doc["sweep"] = cfg.sweep;
  doc["baseline_draws"] = cfg.baseline_draws;
  doc["ber"] = {{"n_users", cfg.ber.n_users},
                {"n_bits", cfg.ber.n_bits},
                {"noise_sweep", cfg.ber.noise_sweep},
                {"trials", cfg.ber.trials},
                {"seed", cfg.ber.seed},
                {"pilot_repeats", cfg.ber.pilot_repeats},
                {"known_channel", cfg.ber.known_channel}};
  doc["output"] = cfg.output;
  return doc;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergence:
      return "convergence";
    case ExperimentKind::kSweepLedCount:
      return "sweep_led_count";
    case ExperimentKind::kSweepSpacing:
      return "sweep_spacing";
    case ExperimentKind::kSweepHeight:
      return "sweep_height";
    case ExperimentKind::kBer:
      return "ber";
    case ExperimentKind::kPowerMap:
      return "power_map";
  }
  return "unknown";
}

RoomScenario ExperimentConfig::room() const {
  return RoomScenario(room_width, room_length, ceiling_height,
                      work_plane_height);
}

LedArray ExperimentConfig::array() const {
  return LedArray(count_x, count_y, spacing_x, spacing_y);
}

void ExperimentConfig::validate() const {
  if (schema_version != 1) fail("schema_version must be 1");
  if (!(room_width > 0.0)) fail("room.width must be positive");
  if (!(room_length > 0.0)) fail("room.length must be positive");
  if (!(ceiling_height > 0.0)) fail("room.ceiling_height must be positive");
  if (!(work_plane_height >= 0.0) || work_plane_height >= ceiling_height)
    fail("room.work_plane_height must lie in [0, room.ceiling_height)");
  if (count_x < 1) fail("array.count_x must be at least 1");
  if (count_y < 1) fail("array.count_y must be at least 1");
  if (!(spacing_x >= 0.0)) fail("array.spacing_x must be nonnegative");
  if (!(spacing_y >= 0.0)) fail("array.spacing_y must be nonnegative");
  if (!(channel.pd_area > 0.0)) fail("channel.pd_area must be positive");
  if (!(channel.lambert_order > 0.0))
    fail("channel.lambert_order must be positive");
  if (!(channel.filter_gain > 0.0) || channel.filter_gain > 1.0)
    fail("channel.filter_gain must be in (0, 1]");
  if (!(channel.concentrator_gain > 0.0))
    fail("channel.concentrator_gain must be positive");
  if (!(channel.fov_half_angle > 0.0) ||
      channel.fov_half_angle > 0.5 * std::numbers::pi)
    fail("channel.fov_half_angle_deg must be in (0, 90]");
  if (!(optimizer.step_size > 0.0)) fail("optimizer.step_size must be positive");
  if (!(optimizer.epsilon > 0.0)) fail("optimizer.epsilon must be positive");
  if (optimizer.max_iterations < 1)
    fail("optimizer.max_iterations must be at least 1");
  if (streams < 1) fail("streams must be at least 1");
  if (!(grid_spacing > 0.0)) fail("grid_spacing must be positive");
  if (baseline_draws < 1) fail("baseline_draws must be at least 1");

  if (is_sweep_kind(kind)) {
    if (sweep.empty()) fail("sweep must be a nonempty array for sweep kinds");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const std::string path = "sweep[" + std::to_string(i) + "]";
      const double value = sweep[i];
      if (kind == ExperimentKind::kSweepLedCount) {
        if (!is_perfect_square(value, nullptr))
          fail(path + " must be a perfect-square LED count");
      } else if (kind == ExperimentKind::kSweepSpacing) {
        if (!(value >= 0.0)) fail(path + " must be nonnegative");
      } else {
        if (!(value >= 0.0) || value >= ceiling_height)
          fail(path + " must lie in [0, room.ceiling_height)");
      }
    }
  } else if (!sweep.empty()) {
    fail("sweep is only valid for sweep_* kinds");
  }

  if (kind == ExperimentKind::kBer) {
    if (ber.n_users < 1) fail("ber.n_users must be at least 1");
    if (ber.n_bits < 1) fail("ber.n_bits must be at least 1");
    if (ber.trials < 1) fail("ber.trials must be at least 1");
    if (ber.pilot_repeats < 1) fail("ber.pilot_repeats must be at least 1");
    if (ber.noise_sweep.empty()) fail("ber.noise_sweep must be nonempty");
    for (std::size_t i = 0; i < ber.noise_sweep.size(); ++i)
      if (!(ber.noise_sweep[i] > 0.0))
        fail("ber.noise_sweep[" + std::to_string(i) + "] must be positive");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(e.what());
  }
  if (!doc.is_object())
    throw ConfigValidationError("top-level config must be a JSON object");
  reject_unknown(doc, "",
                 {"schema_version", "kind", "notes", "room", "array",
                  "channel", "optimizer", "streams", "grid_spacing", "sweep",
                  "baseline_draws", "ber", "output"});

  ExperimentConfig cfg;

  const json* version = find(doc, "schema_version");
  if (!version) fail("schema_version is required");
  cfg.schema_version = as_int(*version, "schema_version");

  const json* kind = find(doc, "kind");
  if (!kind) fail("kind is required");
  cfg.kind = parse_kind(as_string(*kind, "kind"));

  const json* room = find(doc, "room");
  if (!room) fail("room is required");
  if (!room->is_object()) fail("room must be an object");
  parse_room(*room, cfg);

  if (const json* value = find(doc, "notes"))
    cfg.notes = as_string(*value, "notes");
  if (const json* value = find(doc, "array")) {
    if (!value->is_object()) fail("array must be an object");
    parse_array(*value, cfg);
  }
  if (const json* value = find(doc, "channel")) {
    if (!value->is_object()) fail("channel must be an object");
    parse_channel(*value, cfg);
  }
  if (const json* value = find(doc, "optimizer")) {
    if (!value->is_object()) fail("optimizer must be an object");
    parse_optimizer(*value, cfg);
  }
  if (const json* value = find(doc, "streams"))
    cfg.streams = as_int(*value, "streams");
  if (const json* value = find(doc, "grid_spacing"))
    cfg.grid_spacing = as_double(*value, "grid_spacing");
  if (const json* value = find(doc, "sweep"))
    cfg.sweep = as_double_array(*value, "sweep");
  if (const json* value = find(doc, "baseline_draws")) {
    if (!is_sweep_kind(cfg.kind))
      fail("baseline_draws is only valid for sweep_* kinds");
    cfg.baseline_draws = as_int(*value, "baseline_draws");
  }
  if (const json* value = find(doc, "ber")) {
    if (cfg.kind != ExperimentKind::kBer)
      fail("ber settings are only valid for kind 'ber'");
    if (!value->is_object()) fail("ber must be an object");
    parse_ber(*value, cfg);
  }
  if (const json* value = find(doc, "output"))
    cfg.output = as_string(*value, "output");

  if (cfg.kind == ExperimentKind::kBer && cfg.ber.noise_sweep.empty())
    cfg.ber.noise_sweep = default_noise_sweep();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file.string() + "' for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

void require_kind(const ExperimentConfig& config, ExperimentKind expected,
                  const char* who) {
  if (config.kind != expected)
    throw ConfigValidationError(std::string(who) + ": config kind is '" +
                                to_string(config.kind) + "', expected '" +
                                to_string(expected) + "'");
}

Eigen::MatrixXd scenario_gains(const RoomScenario& room, const LedArray& array,
                               const ExperimentConfig& config,
                               SampleGrid* grid_out = nullptr) {
  const SampleGrid grid = sample_work_plane(room, config.grid_spacing);
  const std::vector<Point3> leds = led_positions(array, room);
  Eigen::MatrixXd gains = channel_matrix(leds, grid, config.channel);
  if (grid_out) *grid_out = grid;
  return gains;
}

}  // namespace

ConvergenceRun run_convergence(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::kConvergence, "run_convergence");
  config.validate();
  const Eigen::MatrixXd gains =
      scenario_gains(config.room(), config.array(), config);
  auto [precoder, trace] = optimize(gains, config.streams, config.optimizer);
  return {std::move(precoder), std::move(trace)};
}

SweepRun run_sweep(const ExperimentConfig& config) {
  if (!is_sweep_kind(config.kind))
    throw ConfigValidationError("run_sweep: config kind is '" +
                                to_string(config.kind) +
                                "', expected a sweep_* kind");
  config.validate();

  SweepRun run;
  run.values = config.sweep;
  switch (config.kind) {
    case ExperimentKind::kSweepLedCount:
      run.parameter = "led_count";
      break;
    case ExperimentKind::kSweepSpacing:
      run.parameter = "spacing";
      break;
    default:
      run.parameter = "height";
      break;
  }

  for (std::size_t i = 0; i < config.sweep.size(); ++i) {
    const double value = config.sweep[i];
    RoomScenario room = config.room();
    LedArray array = config.array();
    if (config.kind == ExperimentKind::kSweepLedCount) {
      int side = 0;
      is_perfect_square(value, &side);
      array = LedArray(side, side, config.spacing_x, config.spacing_y);
    } else if (config.kind == ExperimentKind::kSweepSpacing) {
      array = LedArray(config.count_x, config.count_y, value, value);
    } else {
      room = RoomScenario(config.room_width, config.room_length,
                          config.ceiling_height, value);
    }

    const Eigen::MatrixXd gains = scenario_gains(room, array, config);
    OptimizerConfig opt = config.optimizer;
    opt.seed = derive_seed(config.optimizer.seed,
                           {static_cast<std::uint64_t>(i), kOptimizerTag});
    auto [precoder, trace] = optimize(gains, config.streams, opt);

    run.armp_optimized.push_back(armp(gains, precoder));
    run.armp_classical.push_back(classical_armp(
        gains, config.streams, config.baseline_draws,
        derive_seed(config.optimizer.seed,
                    {static_cast<std::uint64_t>(i), kBaselineTag})));
    run.iterations.push_back(trace.iterations_run);
    run.converged.push_back(trace.converged);
  }
  return run;
}

BerResult run_ber(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::kBer, "run_ber");
  config.validate();

  const RoomScenario room = config.room();
  const LedArray array = config.array();
  const std::vector<Point3> leds = led_positions(array, room);
  const Eigen::MatrixXd design_gains = scenario_gains(room, array, config);

  auto [proposed, trace] =
      optimize(design_gains, config.streams, config.optimizer);
  (void)trace;

  // Users land anywhere on the work plane, not just on design grid nodes.
  RandomStream positions(derive_seed(config.ber.seed, {kUserPositionTag}));
  std::vector<Point3> users;
  users.reserve(static_cast<std::size_t>(config.ber.n_users));
  for (int u = 0; u < config.ber.n_users; ++u) {
    const double x = positions.uniform(0.0, room.width());
    const double y = positions.uniform(0.0, room.length());
    users.push_back({x, y, room.work_plane_height()});
  }
  const Eigen::MatrixXd user_gains =
      channel_matrix(leds, users, config.channel);

  const PrecodingMatrix classical =
      random_precoder(array.total(), config.streams,
                      derive_seed(config.ber.seed, {kClassicalDrawTag}));

  return ber_experiment(user_gains, proposed, classical, config.ber);
}

PowerMapRun run_power_map(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::kPowerMap, "run_power_map");
  config.validate();
  SampleGrid grid;
  const Eigen::MatrixXd gains =
      scenario_gains(config.room(), config.array(), config, &grid);
  auto [precoder, trace] = optimize(gains, config.streams, config.optimizer);
  (void)trace;
  PowerMap map = power_map(gains, precoder, grid);
  return {std::move(precoder), std::move(grid), std::move(map)};
}

void write_metadata(std::ostream& out, const ExperimentConfig& config) {
  const std::uint64_t seed = config.kind == ExperimentKind::kBer
                                 ? config.ber.seed
                                 : config.optimizer.seed;
  out << "# tool: omnivlc " << kToolVersion << '\n';
  out << "# seed: " << seed << '\n';
  out << "# config: " << config_to_json(config).dump() << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceRun& run,
                           const ExperimentConfig& config) {
  write_metadata(out, config);
  out << "iteration,objective\n";
  for (std::size_t k = 0; k < run.trace.objective_history.size(); ++k)
    out << k << ',' << csv_double(run.trace.objective_history[k]) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepRun& run,
                     const ExperimentConfig& config) {
  write_metadata(out, config);
  out << run.parameter << ",armp_optimized,armp_classical,iterations,converged\n";
  for (std::size_t i = 0; i < run.values.size(); ++i) {
    out << csv_double(run.values[i]) << ','
        << csv_double(run.armp_optimized[i]) << ','
        << csv_double(run.armp_classical[i]) << ',' << run.iterations[i]
        << ',' << (run.converged[i] ? 1 : 0) << '\n';
  }
}

void write_ber_results_csv(std::ostream& out, const BerResult& result,
                           const ExperimentConfig& config) {
  write_metadata(out, config);
  if (!result.uncoverable_users.empty()) {
    out << "# uncoverable_users:";
    for (std::size_t i = 0; i < result.uncoverable_users.size(); ++i)
      out << (i == 0 ? " " : ",") << result.uncoverable_users[i];
    out << '\n';
  }
  write_ber_csv(out, result);
}

void write_ber_user_results_csv(std::ostream& out, const BerResult& result,
                                const ExperimentConfig& config) {
  write_metadata(out, config);
  write_ber_user_csv(out, result);
}

void write_power_map_results_csv(std::ostream& out, const PowerMapRun& run,
                                 const ExperimentConfig& config) {
  write_metadata(out, config);
  write_power_map_csv(out, run.map, run.grid);
}

}  // namespace omnivlc
