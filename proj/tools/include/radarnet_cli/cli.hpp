#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace radarnet::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 on success, 1 when a library call fails, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "<dir>/<stem>.mean.rdt" next to "<dir>/<stem>.rdw".
std::filesystem::path mean_path_for(const std::filesystem::path& weights);
std::filesystem::path report_path_for(const std::filesystem::path& weights);

}  // namespace radarnet::cli
