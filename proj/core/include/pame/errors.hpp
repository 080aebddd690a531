#pragma once

#include <stdexcept>
#include <string>

namespace pame {

/// Thrown when a caller passes a value outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linear-algebra failure that survived every stabilization attempt.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An object was used in a state that does not support the requested query.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace pame
