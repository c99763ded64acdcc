#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epochsa {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitBoundFailed = 2,
  kExitInternal = 3,
};

/// Entry point of the `epochsa` tool. `args` excludes the program name.
///
///   epochsa run               --config <path> [--out <csv>] [--trials N] [--seed S]
///   epochsa check-assumptions --config <path> [--checks N] [--seed S]
///   epochsa fit-rate          (--csv <path> | --config <path>) [--out <path>]
///   epochsa plot              (--csv <path> | --config <path>) [--out <svg>]
///                             [--epochs <csv>] [--epochs-out <svg>]
///
/// Machine-readable results go to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epochsa
