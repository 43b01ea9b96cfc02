#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace semithermo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;    // bad config, missing file, bad field
inline constexpr int kExitNumeric = 3;   // solver or continuation failure
inline constexpr int kExitResidual = 4;  // residual tolerance exceeded

// Runs one subcommand (julia, pressure, spectrum, check, branches) against a
// JSON config file. out_override, when nonempty, replaces the config's
// output directory; seed_override applies when has_seed_override. Returns
// the process exit code; diagnostics go to err, progress to out.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_override, bool has_seed_override,
                std::uint64_t seed_override, std::ostream& out, std::ostream& err);

}  // namespace semithermo
