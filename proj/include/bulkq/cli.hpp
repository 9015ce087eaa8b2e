#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bulkq::cli {

// Entry point shared by the installed binary and the tests.  `args` excludes
// argv[0].  Reports go to `out` as JSON; human-facing errors go to `err`.
//
// Exit codes: 0 success, 1 usage, 2 guard/domain violation, 3 parse failure,
// 4 internal invariant breach.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bulkq::cli
