#pragma once

#include <iosfwd>

namespace medoidjl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the medoidjl tool. Subcommands: gen, project, net, ddim,
/// opt, verify, stats, experiment. Returns 0 on success (failed checks are
/// results, not errors), 2 on usage or input errors, 3 on internal errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace medoidjl
