#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace upm::cli {

// Exit statuses; library errors map through ErrorCategory.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

// Splits a report file into its timestamp header line and the deterministic body.
struct ReportFile {
  std::string header;
  std::string body;
};
ReportFile read_report(const std::string& path);

}  // namespace upm::cli
