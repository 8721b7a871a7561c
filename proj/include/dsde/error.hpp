#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsde {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or name-resolution failure in the expression language.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error("offset " + std::to_string(offset) + ": " + message)
        , offset_(offset)
        , message_(message)
    {}

    /// Byte offset into the parsed source.
    std::size_t offset() const noexcept { return offset_; }
    const std::string& detail() const noexcept { return message_; }

private:
    std::size_t offset_;
    std::string message_;
};

/// A branch expression produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Input data violates a structural requirement (ordering, ranges, assumptions).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical path produced a non-finite state.
class PathError : public Error {
public:
    PathError(std::size_t path, int level, std::size_t step, const std::string& message)
        : Error(message)
        , path_(path)
        , level_(level)
        , step_(step)
    {}

    std::size_t path() const noexcept { return path_; }
    int level() const noexcept { return level_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t path_;
    int level_;
    std::size_t step_;
};

/// Invariant broken inside the library; indicates a bug rather than bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace dsde
