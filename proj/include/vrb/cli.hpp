#pragma once

#include <string>
#include <vector>

namespace vrb::cli {

// Dispatches a full argv (including the program name). Returns the process
// exit status: 0 success, 2 usage error, 1 runtime error. Data goes to
// user-named paths and a one-line key=value summary to stdout; logs go to
// stderr (see VRB_LOG).
int run_command(const std::vector<std::string>& argv);

} // namespace vrb::cli
