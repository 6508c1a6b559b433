#pragma once

#include "core/runconfig.hpp"

namespace ptcov {

// Command implementations behind the CLI: each takes the parsed run-config
// document, performs all file IO named there, and returns the JSON report.
Json cmd_test(const Json& config);
Json cmd_corr(const Json& config);
Json cmd_select(const Json& config);
Json cmd_simulate(const Json& config);
Json cmd_replicate(const Json& config);

Json run_command(const std::string& command, const Json& config);

}  // namespace ptcov
