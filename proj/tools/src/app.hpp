#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bnk::app {

enum ExitCode : int { ok = 0, usage = 1, validation = 2, blow_up = 3, numerical = 4 };

/// Full command line, argv[0] included. Never throws; failures map to exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnk::app
