#pragma once

#include <ostream>

namespace hetprop {

// Entry point of the `hetprop` command line tool. Returns the process exit
// code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetprop
