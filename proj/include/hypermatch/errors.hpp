#pragma once

#include <stdexcept>
#include <string>

namespace hypermatch {

// Caller-side misuse: bad vertex ids, malformed files, violated preconditions.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A broken internal invariant. Indicates a bug, never bad input.
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace hypermatch
