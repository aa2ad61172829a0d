#pragma once

#include <iosfwd>

namespace nlskt {

// Exit status: 0 success, 2 configuration error, 3 solver failure.
int parse_and_dispatch(int argc, const char* const* argv);

}  // namespace nlskt
