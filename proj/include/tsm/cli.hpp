#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tsm::cli
{
    /// Process exit codes.
    enum ExitCode : int
    {
        ok = 0,
        usage = 1,
        io = 2,
        numeric = 3
    };

    /// Entry point of the `tsm` tool. `args[0]` is the program name.
    ///
    /// Subcommands: stretch, diag, generate, acceptance. See `tsm --help`.
    int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
}  // namespace tsm::cli
