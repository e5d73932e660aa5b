#pragma once

#include <iosfwd>

namespace cktool {

// Exit codes: 0 ok/contained, 1 usage, 2 invalid input, 3 unreachable or not
// contained, 4 not incoherent, 5 not trace-preserving.
enum Exit { kOk = 0, kUsage = 1, kInvalidInput = 2, kUnreachable = 3, kNotIncoherent = 4, kNotTracePreserving = 5 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cktool
