#pragma once

#include <stdexcept>
#include <string>

namespace fedoq {

// Expression or JSON text could not be read. Carries a character position
// when one is known (npos otherwise).
class ParseError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit ParseError(std::string msg, std::size_t pos = npos)
        : std::runtime_error(std::move(msg)), pos_(pos) {}

    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

// Input data is well-formed but semantically inadmissible (Jacobi failure,
// singular matrix, inconsistent explicit basis data, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A structural identity that must hold for validated input failed mid-run.
// The message names the identity.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fedoq
