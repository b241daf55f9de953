#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace huberbench::cli {

/// Exit codes: 0 success, 1 usage error, 2 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

/// Reads `key = value` lines ('#' starts a comment, blank lines ignored) and
/// returns them as `--key=value` tokens in file order.
std::vector<std::string> config_file_tokens(const std::string& path);

}  // namespace huberbench::cli
