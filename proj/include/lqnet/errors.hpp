#pragma once

#include <stdexcept>
#include <string>

namespace lqnet {

/// Base of every domain error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a type invariant. The message starts with the offending field path.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Clipped best-response iteration did not settle within its budget.
class NonContraction : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A threshold search found a predicate that is not monotone on its bracket.
class BracketFailure : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

class SponsorshipMismatch : public Error {
public:
    using Error::Error;
};

class UnknownTreatment : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class SchemaVersionError : public Error {
public:
    using Error::Error;
};

}  // namespace lqnet
