#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beliefplan {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Syntax error in a formula or model file. `position` is a character
/// offset into the formula text, or 0 when only a line-based location
/// is available (the message then carries the line number).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Model validation failure (row sums, dangling indices, dimension
/// mismatches, zero-likelihood observations).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Formula-to-automaton compilation failure (state bound exceeded,
/// unsatisfiable objective).
class CompileError : public Error {
public:
    using Error::Error;
};

/// Planner failure (oracle node budget exceeded, invalid search root).
class PlanError : public Error {
public:
    using Error::Error;
};

} // namespace beliefplan
