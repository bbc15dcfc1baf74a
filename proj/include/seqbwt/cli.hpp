#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqbwt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

/// Environment variable naming the external compressor for `stats`.
inline constexpr const char* kExternalEnv = "SEQBWT_EXTERNAL";

/// Runs one subcommand. `args` excludes the program name. "-" paths use the
/// given streams.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace seqbwt::cli
