#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsearch {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed user input: formula text, JSON files, CSV files.
class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t position)
        : InputError(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UndeclaredAtomError : public InputError {
public:
    explicit UndeclaredAtomError(std::string atom)
        : InputError("undeclared atomic proposition '" + atom + "'"), atom_(std::move(atom)) {}
    const std::string& atom() const noexcept { return atom_; }

private:
    std::string atom_;
};

// Malformed file content; location is a JSON pointer or "line N".
class FormatError : public InputError {
public:
    FormatError(const std::string& what, std::string location)
        : InputError(what + " (at " + location + ")"), location_(std::move(location)) {}
    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

class EmptyTraceError : public InputError {
public:
    EmptyTraceError() : InputError("trace must contain at least one step") {}
};

class PropositionMismatchError : public InputError {
public:
    using InputError::InputError;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class DegenerateDataError : public InputError {
public:
    using InputError::InputError;
};

// Verification exceeded a configured resource bound.
class ResourceError : public Error {
public:
    using Error::Error;
};

class DfaStateLimitError : public ResourceError {
public:
    explicit DfaStateLimitError(std::size_t cap)
        : ResourceError("DFA construction exceeded the state cap of " + std::to_string(cap)) {}
};

class EnumerationLimitError : public ResourceError {
public:
    explicit EnumerationLimitError(std::size_t cap)
        : ResourceError("trajectory enumeration exceeded the cap of " + std::to_string(cap) +
                        " paths; use check_probability instead") {}
};

class TransportError : public Error {
public:
    using Error::Error;
};

class UnparseableCompletionError : public Error {
public:
    UnparseableCompletionError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}
    const std::string& raw_completion() const noexcept { return raw_; }

private:
    std::string raw_;
};

}  // namespace vsearch
