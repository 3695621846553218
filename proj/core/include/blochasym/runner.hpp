#pragma once

#include "blochasym/config.hpp"

namespace blochasym {

// Dispatches cfg.command and writes the result table to cfg.output (or
// stdout).  Exit codes: 0 success, 1 error, 2 validation failure.
int run_command(const RunConfig& cfg);

}  // namespace blochasym
