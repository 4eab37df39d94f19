#pragma once

#include <iosfwd>

namespace posmnl {

// Built-in diagnostic suites: optimizer agreement with full enumeration on a
// seeded random corpus, plus distribution, estimation, and policy invariants.
// Prints one line per suite to `out` and returns true when every suite holds.
bool run_selftest(std::ostream& out);

}  // namespace posmnl
