#pragma once

namespace bfree {

// full command-line driver; returns the process exit code
// (0 success, 1 invalid input, 2 resource limit)
int run_cli(int argc, char** argv);

} // namespace bfree
