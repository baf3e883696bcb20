#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "avgh/config.hpp"

namespace avgh {

/// Everything a run writes, keyed by file name; report.txt and manifest included.
struct RunArtifacts {
  std::map<std::string, std::string> files;
  std::size_t violations = 0;
};

/// Runs the configured command in memory.
RunArtifacts run_command(const ParsedConfig& pc);

/// Runs the command and writes its artifacts into run.out (atomic renames). Returns 0.
int run(const ParsedConfig& pc);

/// Full command line front end; returns the process exit code
/// (0 success, 1 parse, 2 validation, 3 numerical failure).
int cli_main(int argc, char** argv);

}  // namespace avgh
