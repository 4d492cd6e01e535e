#ifndef RADLABEL_CLI_H_
#define RADLABEL_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace radlabel {

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitTransport = 4,
};

// Runs one command line (without the program name). Failures are reported on
// `err` as a single JSON line {"error": kind, "message": text}.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace radlabel

#endif  // RADLABEL_CLI_H_
