#pragma once

#include <stdexcept>
#include <string>

namespace twinbeam {

// Base of every error raised by the library. Subclasses let callers (and the
// CLI exit-code mapping) tell parameter problems apart from numerical ones.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value violates a documented type invariant.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

// The operating point sits below the oscillation threshold (s < 1).
class BelowThreshold : public Error {
public:
    using Error::Error;
};

// Input outside the mathematical domain of a function (log of zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Shapes disagree: frequency grids of different length or content.
class StructuralError : public Error {
public:
    using Error::Error;
};

// A data value is unusable; carries the offending bin or row.
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// Too few observations for the requested number of free parameters.
class InsufficientData : public Error {
public:
    using Error::Error;
};

// The normal equations of a fit are singular.
class SingularFit : public Error {
public:
    using Error::Error;
};

// The data carry no information about the requested parameters.
class Unidentifiable : public Error {
public:
    using Error::Error;
};

// Decomposition would require a negative classical excess noise.
class NegativeExcessNoise : public Error {
public:
    using Error::Error;
};

}  // namespace twinbeam
