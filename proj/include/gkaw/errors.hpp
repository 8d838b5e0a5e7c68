#pragma once

#include <stdexcept>
#include <string>

namespace gkaw {

// Base class for everything thrown by the toolkit.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

struct UnknownIdentifier : ParseError {
    UnknownIdentifier(const std::string& name, std::size_t pos)
        : ParseError("unknown identifier '" + name + "'", pos) {}
};

struct DomainError : Error {
    using Error::Error;
};

struct JetOrderOverflow : Error {
    using Error::Error;
};

struct UnsupportedConstruct : Error {
    using Error::Error;
};

struct UnboundSymbol : Error {
    using Error::Error;
};

struct NotADivergence : Error {
    using Error::Error;
};

struct NonPolynomialResidue : Error {
    using Error::Error;
};

struct SingularHomotopy : Error {
    using Error::Error;
};

struct NonIntegrable : Error {
    using Error::Error;
};

struct ConstraintViolated : Error {
    using Error::Error;
};

struct BlowUp : Error {
    BlowUp(const std::string& msg, double when) : Error(msg), time(when) {}
    double time;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace gkaw
