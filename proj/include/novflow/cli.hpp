#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace novflow {

/// Runs one CLI invocation; args excludes the program name. The report goes
/// to `out`, diagnostics to `err`. Returns 0 when ok, 1 when a violation was
/// found (or a check could not be completed), 2 on usage or parse errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace novflow
