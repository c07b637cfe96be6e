#pragma once

namespace polar::cli {

/// Exit statuses of the polarctl tool.
enum Exit : int {
  kOk = 0,
  kAssertionFailed = 1,
  kConfigError = 2,
  kStalled = 3,
};

/// Entry point of polarctl: subcommands solve-discrete, solve-continuous and
/// verify. Returns the process exit status.
int run(int argc, char** argv);

}  // namespace polar::cli
