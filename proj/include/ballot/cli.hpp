#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ballot {

// Runs one `ballot` subcommand. Returns 0 on success, 1 on runtime failure
// and 2 on usage or configuration errors; failures print a single
// "error: <code>: <message>" line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ballot
