#pragma once

#include <stdexcept>
#include <string>

namespace chatelet {

// Bad input: zero where a unit is required, non-prime place, malformed system.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Enumeration or memory budget would be exceeded, or a 128-bit overflow.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A documented precondition of a lemma-style check does not hold.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An iterative computation did not settle; `partial` carries what was seen.
struct InconclusiveError : std::runtime_error {
    std::string partial;
    InconclusiveError(const std::string& what, std::string partial_data)
        : std::runtime_error(what), partial(std::move(partial_data)) {}
};

// sign_pattern hit the zero locus of some form.
struct ZeroValueError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace chatelet
