#pragma once

#include <stdexcept>
#include <string>

namespace sizespec {

// Bad user input: malformed files, invalid configuration, missing paths.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical breakdown: non-convergence, NaN in a sweep, violated stability bound.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sizespec
