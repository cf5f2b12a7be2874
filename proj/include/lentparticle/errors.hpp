#pragma once

#include <stdexcept>

namespace lp {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
    using std::domain_error::domain_error;
};

// An object lacks something an operation needs (e.g. a second derivative).
class CapabilityError : public std::logic_error {
    using std::logic_error::logic_error;
};

// Marks and atoms of different lengths.
class AlignmentError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace lp
