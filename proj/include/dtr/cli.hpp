#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dtr {

/// Exit statuses of the command-line front end.
enum CliStatus { kCliOk = 0, kCliRefused = 1, kCliUsage = 2 };

/// Runs `dtr <verb> ...`. `args` excludes the program name. Input named
/// `-` is read from `in`; results go to `out` unless `-o` is given, and
/// diagnostics go to `err` as `CODE: message @ location` lines.
int runCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err);

}  // namespace dtr
