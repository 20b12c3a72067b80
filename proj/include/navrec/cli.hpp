#pragma once

namespace navrec {

// Full command-line entry point (subcommands: phantom, acquire, train-dae,
// recon, eval, render, compare). Returns the process exit code:
//   0 success, 1 compare mismatch, 2 usage/input error, 3 numerical failure.
// Exposed as a function so tests can drive whole pipelines in-process.
int run_cli(int argc, const char* const* argv);

}  // namespace navrec
