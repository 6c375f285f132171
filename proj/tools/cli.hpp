#pragma once

#include <iosfwd>

namespace sscat::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kDomain = 1;   // invalid δ, ε, ...
inline constexpr int kNumeric = 2;  // numeric failure, or a value below its floor where one was demanded
inline constexpr int kUsage = 64;   // bad flags or configuration

/// Parses argv and runs one subcommand. JSON goes to `out` unless --out names
/// a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sscat::cli
