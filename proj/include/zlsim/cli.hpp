#pragma once

// zlsim command line. Subcommands: simulate, crest, schedule, workload,
// model, goldens, sweep. Exit codes: 0 ok, 1 verification failure, 2 bad
// usage or config.

#include <iosfwd>

namespace zlsim::cli {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zlsim::cli
