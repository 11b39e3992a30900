#pragma once

#include <iosfwd>

namespace polyvol {

/// Command-line front end. Returns 0 on success, 1 on bad input and 2 when a
/// computation fails.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polyvol
