#pragma once

#include <string>

#include "cme/config.hpp"

namespace cme {

// Executes one CLI subcommand (rates | bias | lowerbound | concentration |
// diagnostics), writing CSVs and manifests under out_dir. Returns the process
// exit code: 0 on success, 2 when a scientific check fails (outputs are still
// written). Usage errors are reported by throwing std::invalid_argument.
int run_subcommand(const std::string& sub, const Config& cfg,
                   const std::string& out_dir, int threads);

}  // namespace cme
