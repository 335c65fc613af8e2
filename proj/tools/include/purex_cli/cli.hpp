#pragma once

#include <iosfwd>

namespace purex {

/// Entry point of the `purex` tool. Returns 0 on success, 1 on validation
/// errors (bad flags, bad config, bad input), 2 on runtime failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace purex
