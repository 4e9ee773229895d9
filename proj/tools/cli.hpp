#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mibguard::cli {

// Runs one subcommand (synth | rank | train | eval | predict | collect).
// args excludes the program name. Exit codes: 0 success, 1 usage error,
// 2 data/model error, 3 network error. Diagnostics go to err; machine
// output goes to out or the --out file.
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace mibguard::cli
