#pragma once

#include <stdexcept>
#include <string>

namespace decern {

// Base for every error raised by the library. Message text is part of the
// contract for the cases named in the module docs ("empty vector", ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The experiment cannot proceed with the requested budget (too few unlabeled
// samples left, too few candidates for clustering).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// A report or data file does not match the expected schema/version.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace decern
