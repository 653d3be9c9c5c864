#pragma once

#include <stdexcept>
#include <string>

namespace allocopt {

// Base for everything this library throws on bad input or unattainable
// requests. The CLI maps these to exit status 2; anything else is a bug (1).
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (negative amount, p out of [0,1], ...).
struct domain_error : error {
    using error::error;
};

// The request cannot be satisfied: budget below 1 unit where one is required,
// budget exceeding total capacity, no cap-feasible grid point, and so on.
struct infeasible_error : error {
    using error::error;
};

// Instance too large for an exact enumeration path.
struct size_error : error {
    using error::error;
};

// A bracketed root search found no sign change.
struct no_root_error : error {
    using error::error;
};

// A closed-form expression degenerates (zero denominator, p in {0,1}).
struct degenerate_error : error {
    using error::error;
};

}  // namespace allocopt
