#pragma once

namespace ares {

// Command-line front end. Subcommands: simulate | sweep | kalman | convert.
// Returns the process exit code: 0 on success (simulate: no stampede),
// 2 when simulate flags a stampede, 1 on any error. When --seed is absent
// the ARES_SEED environment variable supplies the master seed.
int run_cli(int argc, const char* const* argv);

}  // namespace ares
