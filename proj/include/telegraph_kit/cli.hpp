#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace telegraph_kit::cli {

enum ExitCode : int {
    success = 0,
    statistical_failure = 1,
    invalid_input = 2,
    non_convergence = 3,
};

/// Runs one command line; args excludes the program name. Tables go to out
/// unless --out names a file, in which case a <file>.manifest.json is written
/// next to it. Diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace telegraph_kit::cli
