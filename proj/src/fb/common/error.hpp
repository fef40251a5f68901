#pragma once

#include <stdexcept>
#include <string>

namespace fb {

// Three failure classes, mirrored by the C API status codes and the CLI exit
// codes: bad caller input, bad data, and models that cannot be built or
// converted (violated constraints, degenerate fits).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class ModelError : public Error {
public:
    using Error::Error;
};

}  // namespace fb
