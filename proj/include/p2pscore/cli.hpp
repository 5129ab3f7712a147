#pragma once

#include <iostream>

namespace p2p {

// Full command-line surface: subcommands synth, describe, train, evaluate,
// compare, score. Configuration comes from a flat key=value file (--config)
// with flag overrides; the fully resolved configuration is echoed into every
// report so any artifact can be reproduced from its own header.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 training error.
// Status lines go to `out`, error messages to `err` (parameterized so tests
// can run commands in-process and capture them).
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace p2p
