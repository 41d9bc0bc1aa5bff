#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gwlife::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInvalidSpec = 2,
    kIndeterminate = 3,
    kCapSaturated = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

} // namespace gwlife::cli
