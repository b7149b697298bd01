#pragma once

#include <iosfwd>

namespace sbmm {

/// Entry point of the sbmm-cli binary. Returns the process exit status:
/// 0 on success, 2 when a hypothesis of the requested computation fails,
/// 1 on usage or I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sbmm
