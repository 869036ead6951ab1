#pragma once

#include "fountain/artifacts.hpp"
#include "fountain/run_config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace fountain {

enum class Command { spectrum, audit, geometry, solve, validate, all };

std::optional<Command> parse_command(const std::string& s);
const char* to_string(Command c);

struct RunOptions {
  Command command = Command::all;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  /// Output directory; falls back to FOUNTAIN_OUT_DIR, then the config.
  std::optional<std::string> out;
  int jobs = 1;
  /// Stop with exit code 2 before solving when an audit finds a violation.
  bool gate_on_audit = false;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int audit_violation = 2;
}  // namespace exit_code

/// Runs one command and writes its artifacts plus manifest.json. Errors are
/// reported as error.json in the output directory and exit code 1.
int run(const RunOptions& options, std::ostream& log);

/// Same as run() with a configuration already in memory.
int run(const RunOptions& options, const RunConfig& config, std::ostream& log);

}  // namespace fountain
