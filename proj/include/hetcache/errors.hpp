#pragma once

#include <stdexcept>
#include <string>

namespace hetcache {

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative numerical routine cannot reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a serving-distance law is requested for a tier that never serves the content.
class UndefinedDistribution : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace hetcache
