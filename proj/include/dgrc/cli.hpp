#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace dgrc {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `dgrc` tool; args[0] is the program name.
// Subcommands: build-stimuli, run, report, cache.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dgrc
