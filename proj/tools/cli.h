#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwalk::cli {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Full command line without the program name. Errors go to `err` as one
/// line: qwalk: error code=<n> kind=<kind> msg="<text>".
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qwalk::cli
