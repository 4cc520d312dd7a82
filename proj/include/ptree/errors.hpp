#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptree {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in the event/query language or in a tree document.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// A statement's variable is never bound on some realization.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A transform or query cannot be evaluated on the given tree.
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace ptree
