#pragma once

#include <string>
#include <vector>

namespace bargmann::cli {

// Runs the command line; returns 0 on success, 1 on domain errors, 2 on
// usage errors. JSON results go to stdout, diagnostics to stderr.
int run(const std::vector<std::string>& args);

}  // namespace bargmann::cli
