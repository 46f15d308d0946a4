#pragma once

#include <iosfwd>

namespace shiryaev::cli {

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 on success, 2 on invalid arguments, 1 on runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shiryaev::cli
