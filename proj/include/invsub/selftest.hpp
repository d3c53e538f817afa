#pragma once

namespace invsub {

// Run every module's built-in checks in dependency order. Returns 0 when all
// pass; otherwise a nonzero code identifying the first failing module.
int run_selftests(bool verbose);

}  // namespace invsub
