#pragma once

#include <stdexcept>
#include <string>

namespace msf::mlpx {

/// Raised for dataset problems (unreadable file, missing column, malformed
/// cell, series too short for the configured windows): distinct from config
/// validation errors so callers can map them to a dedicated exit path.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace msf::mlpx
