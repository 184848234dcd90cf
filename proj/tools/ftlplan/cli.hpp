#pragma once

#include <ostream>

namespace ftl::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 2,
  kInputError = 3,
  kStrictFailure = 4,
};

/// Entry point of the ftlplan tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ftl::cli
