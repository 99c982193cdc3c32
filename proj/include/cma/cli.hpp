#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cma {

inline constexpr const char* tool_version = "0.1.0";

/// Runs one command line (args exclude the program name). Returns 0 on
/// success, 1 when an analysis precondition fails and 2 on input or usage
/// errors. Reports go to `out` unless -o names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace cma
