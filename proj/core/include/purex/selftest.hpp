#pragma once

#include <iosfwd>

namespace purex {

/// Quick invariant checks over every module. Prints one line per check and
/// returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace purex
