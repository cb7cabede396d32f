#pragma once

namespace detnet::cli {

// Command-line entry point. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 runtime failure.
int run(int argc, const char* const* argv);

}  // namespace detnet::cli
