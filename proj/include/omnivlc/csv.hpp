#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "omnivlc/errors.hpp"

namespace omnivlc {

/// Shortest decimal form with 17 significant digits, enough to round-trip
/// any double exactly.
inline std::string csv_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

/// Opens a file for writing, throwing IoError instead of silently producing
/// a dead stream.
inline std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out)
    throw IoError("cannot open '" + file.string() + "' for writing");
  return out;
}

}  // namespace omnivlc
