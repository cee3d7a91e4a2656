#pragma once

#include <iosfwd>

namespace swarm {

/// Exit codes: 0 success, 1 usage or configuration error (nothing written),
/// 2 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swarm
