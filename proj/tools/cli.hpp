#pragma once

#include <iosfwd>

namespace wxcast::cli {

/// Exit codes: 0 success, 1 usage or configuration error, 2 data or estimation error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace wxcast::cli
