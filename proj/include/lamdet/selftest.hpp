#pragma once

#include <iosfwd>

namespace lamdet {

/// Runs the built-in invariant suite, printing one line per check.
/// Returns the number of failed checks.
int run_selftest(std::ostream& os);

} // namespace lamdet
