// error.hpp - Exception hierarchy shared by the library and the command-line tool

#pragma once

#include <stdexcept>
#include <string>

namespace bathkit {

// Base class; every library failure derives from it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad files, schema violations, invalid parameters.
class InputError : public Error {
public:
    using Error::Error;
};

// An iterative solver failed to reach its termination criterion.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// A configured resource cap (memory, Hilbert-space dimension) would be exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Input is well-formed but describes something unphysical (e.g. S_beta < 0).
class PhysicsError : public Error {
public:
    using Error::Error;
};

} // namespace bathkit
