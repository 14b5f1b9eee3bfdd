#pragma once

#include "pondera/config.hpp"

#include <iosfwd>
#include <string>

namespace pondera {

// Exit codes: 0 success, 1 validation failure or unusable operating point,
// 2 configuration error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation_failure = 1;
inline constexpr int exit_config_error = 2;

/// Dispatch one command (spectrum, cancel, map, squeeze, stability,
/// validate). Artifacts go to cfg.out_path (stdout when empty); diagnostics
/// to `log`.
int run_command(const std::string& command, const RunConfig& cfg,
                std::ostream& log);

/// Worker cap for sweep fan-out. Reads PONDERA_THREADS, defaults to the
/// hardware concurrency.
unsigned worker_count();

} // namespace pondera
