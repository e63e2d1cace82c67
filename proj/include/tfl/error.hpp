#pragma once

#include <stdexcept>
#include <string>

namespace tfl {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::string expected)
        : Error("syntax error at " + std::to_string(position) + ": expected " + expected),
          position_(position), expected_(std::move(expected)) {}
    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

class UnknownVariable : public Error {
public:
    UnknownVariable(std::string name, std::size_t position)
        : Error("unknown variable '" + name + "' at " + std::to_string(position)),
          name_(std::move(name)), position_(position) {}
    const std::string& name() const { return name_; }
    std::size_t position() const { return position_; }

private:
    std::string name_;
    std::size_t position_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DegreeOverflow : public Error {
public:
    using Error::Error;
};

class RegularityViolation : public Error {
public:
    using Error::Error;
};

class RankDeficientN : public Error {
public:
    using Error::Error;
};

class InvarianceViolation : public Error {
public:
    using Error::Error;
};

class NotRegularAt : public Error {
public:
    using Error::Error;
};

class NoTermination : public Error {
public:
    using Error::Error;
};

class PointNotOnL : public Error {
public:
    using Error::Error;
};

class SamplingFailed : public Error {
public:
    using Error::Error;
};

class IntegrationFailed : public Error {
public:
    using Error::Error;
};

class AdaptationFailed : public Error {
public:
    using Error::Error;
};

class HintRejected : public Error {
public:
    using Error::Error;
};

class SubsumptionFailed : public Error {
public:
    using Error::Error;
};

class InconclusiveZeroTest : public Error {
public:
    using Error::Error;
};

class NoRelativeDegree : public Error {
public:
    using Error::Error;
};

class IndependenceViolation : public Error {
public:
    using Error::Error;
};

class CompletionFailed : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

class CertificateMismatch : public Error {
public:
    using Error::Error;
};

class ConditionsFailed : public Error {
public:
    using Error::Error;
};

class InvalidProblem : public Error {
public:
    using Error::Error;
};

// An invariant the implementation relies on did not hold.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace tfl
