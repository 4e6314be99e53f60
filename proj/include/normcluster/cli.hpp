#pragma once

#include <iosfwd>

namespace normcluster::cli {

/// Runs one `normcluster` invocation. Output that has no --out target goes
/// to `out`, diagnostics to `err`. Returns 0 on success, 1 on input errors
/// (bad flags, missing or malformed files), 2 on runtime failures.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace normcluster::cli
