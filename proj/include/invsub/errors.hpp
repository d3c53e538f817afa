#pragma once

#include <stdexcept>
#include <string>

namespace invsub {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma evaluated at (or solution parameter landing on) a nonpositive integer.
struct PoleError : Error {
    using Error::Error;
};

// A series or adaptive quadrature failed to reach its tolerance in budget,
// or left its numerically trustworthy domain.
struct ConvergenceError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// A symbolic rule was asked to act on a term shape it has no rule for.
struct UnsupportedTermError : Error {
    using Error::Error;
};

// Recip applied to an operand that does not reduce to a constant in x.
struct RecipOnNonConstant : Error {
    using Error::Error;
};

// Recip (or a rational coefficient) with an identically-zero denominator.
struct DivisionBySymbolicZero : Error {
    using Error::Error;
};

// reduce() called on a basis the operator does not map into itself.
struct NotInvariantError : Error {
    using Error::Error;
};

// Initial profile has a component outside the span of the basis.
struct NotInBasisError : Error {
    using Error::Error;
};

// No closed-form strategy matches a reduced equation.
struct UnsupportedSystemError : Error {
    using Error::Error;
};

// Orders cannot be brought to a common commensurate step.
struct CommensurabilityError : Error {
    using Error::Error;
};

// A rational right-hand side hit a vanishing denominator during time stepping.
struct DenominatorBlowupError : Error {
    using Error::Error;
};

// An even-root condition with a negative radicand.
struct NoRealSolutionError : Error {
    using Error::Error;
};

// Malformed problem JSON.
struct SchemaError : Error {
    using Error::Error;
};

} // namespace invsub
