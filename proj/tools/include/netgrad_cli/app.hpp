#pragma once

#include <iosfwd>

namespace netgrad::cli {

/// Full command line: `netgrad <subcommand> --config <path> [--out <dir>] [--seed <int>] [--sweep <glob>]`.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netgrad::cli
